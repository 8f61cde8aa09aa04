// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "doctest.h"
#include "llmsim/error.hpp"
#include "llmsim/profiles.hpp"
#include "support.hpp"

using namespace llmsim;
using llmsim::testing::Rng;

namespace {

std::string one_profile_doc(const std::string& body) {
  return R"({"profiles": [{"name": "toy", )" + body + "}]}";
}

constexpr const char* kToyBody =
    R"("compute": {"tops": 1, "pj_per_op": 0},
       "main_memory": {"bw_gbps": 10, "pj_per_bit": 0},
       "h2d": {"bw_gbps": 1, "pj_per_bit": 0},
       "d2h": {"bw_gbps": 1, "pj_per_bit": 0})";

}  // namespace

TEST_CASE("builtin device rows") {
  const ProfileRegistry reg = builtin_profiles();
  REQUIRE(reg.size() == 6);

  const auto& chip = reg.lookup("PIM-AI chip");
  CHECK(chip.compute_tops == 5);
  CHECK(chip.compute_pj_per_op == 0.4);
  CHECK(chip.main_memory == LinkParams{102.4, 0.95});
  CHECK(chip.h2d == LinkParams{12.8, 20});
  CHECK(chip.d2h == LinkParams{12.8, 20});

  const auto& server = reg.lookup("PIM-AI server");
  CHECK(server.compute_tops == 3072);
  CHECK(server.compute_pj_per_op == 0.5);
  CHECK(server.main_memory == LinkParams{39321.6, 0.95});
  CHECK(server.h2d == LinkParams{22, 1920});
  CHECK(server.d2h == LinkParams{528, 50});

  const auto& a17 = reg.lookup("A17 Pro");
  CHECK(a17.compute_tops == 17);
  CHECK(a17.compute_pj_per_op == 0.4);
  CHECK(a17.main_memory == LinkParams{51.2, 20});
  CHECK(a17.h2d == LinkParams{51.2, 20});
  CHECK(a17.d2h == LinkParams{51.2, 20});

  const auto& sd = reg.lookup("Snapdragon 8 Gen3");
  CHECK(sd.compute_tops == 17);
  CHECK(sd.compute_pj_per_op == 0.4);
  CHECK(sd.main_memory == LinkParams{77, 10});
  CHECK(sd.h2d == LinkParams{77, 10});

  const auto& dim = reg.lookup("Dimensity 9300");
  CHECK(dim.compute_tops == 16);
  CHECK(dim.main_memory == LinkParams{76.8, 10});
  CHECK(dim.d2h == LinkParams{76.8, 10});

  const auto& dgx = reg.lookup("DGX-H100");
  CHECK(dgx.compute_tops == 7916);
  CHECK(dgx.compute_pj_per_op == 0.5);
  CHECK(dgx.main_memory == LinkParams{26800, 7});
  CHECK(dgx.h2d == LinkParams{450, 280});
  CHECK(dgx.d2h == LinkParams{450, 40});
}

TEST_CASE("builtin aux costs are the documented defaults") {
  const ProfileRegistry builtins = builtin_profiles();
  for (const auto& p : builtins.profiles()) {
    CHECK(validate_profile(p).empty());
    for (AuxKind k : kAllAuxKinds) {
      CHECK(p.aux_cost(k).elements_per_s == p.compute_tops * 1e12 / 8.0);
      CHECK(p.aux_cost(k).pj_per_element == p.compute_pj_per_op);
    }
  }
}

TEST_CASE("lookup of an unknown name") {
  CHECK_THROWS_AS(builtin_profiles().lookup("TPU"), LookupError);
  CHECK(builtin_profiles().find("TPU") == nullptr);
}

TEST_CASE("serialization round trip") {
  const ProfileRegistry builtins = builtin_profiles();
  for (const auto& p : builtins.profiles()) {
    const std::string text = serialize_profile(p);
    const ProfileRegistry back = load_profiles(R"({"profiles": [)" + text + "]}");
    REQUIRE(back.size() == 1);
    CHECK(back.profiles().front() == p);
    CHECK(serialize_profile(back.profiles().front()) == text);
  }
  const std::string all = serialize_profiles(builtin_profiles());
  CHECK(serialize_profiles(load_profiles(all)) == all);

  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const HardwareProfile p = llmsim::testing::random_profile(rng, "p" + std::to_string(i));
    const std::string text = serialize_profile(p);
    const ProfileRegistry back = load_profiles(R"({"profiles": [)" + text + "]}");
    CHECK(back.profiles().front() == p);
    CHECK(serialize_profile(back.profiles().front()) == text);
  }
}

TEST_CASE("load_profiles") {
  SUBCASE("minimal profile") {
    const ProfileRegistry reg = load_profiles(one_profile_doc(kToyBody));
    CHECK(reg.size() == 1);
    const auto& p = reg.lookup("toy");
    CHECK(p.main_memory.bw_gbps == 10);
    CHECK(p.aux_cost(AuxKind::kNorm).elements_per_s == 1e12 / 8.0);
  }
  SUBCASE("override merged over builtins") {
    const ProfileRegistry reg = load_profiles(
        R"({"profiles": [{"name": "PIM-AI chip",
            "compute": {"tops": 5, "pj_per_op": 0.4},
            "main_memory": {"bw_gbps": 204.8, "pj_per_bit": 0.95},
            "h2d": {"bw_gbps": 12.8, "pj_per_bit": 20},
            "d2h": {"bw_gbps": 12.8, "pj_per_bit": 20}}]})",
        true);
    CHECK(reg.size() == 6);
    CHECK(reg.lookup("PIM-AI chip").main_memory.bw_gbps == 204.8);
    CHECK(reg.lookup("A17 Pro").main_memory.bw_gbps == 51.2);
  }
  SUBCASE("negative bandwidth names the field") {
    std::string body = kToyBody;
    body.replace(body.find("\"bw_gbps\": 10"), 13, "\"bw_gbps\": -1");
    try {
      load_profiles(one_profile_doc(body));
      FAIL("expected an error");
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      CHECK(what.find("toy") != std::string::npos);
      CHECK(what.find("main_memory.bw_gbps") != std::string::npos);
    }
  }
  SUBCASE("missing field") {
    CHECK_THROWS_AS(load_profiles(R"({"profiles": [{"name": "x"}]})"), ConfigError);
  }
  SUBCASE("mistyped field") {
    std::string body = kToyBody;
    body.replace(body.find("\"tops\": 1"), 9, "\"tops\": \"1\"");
    CHECK_THROWS_AS(load_profiles(one_profile_doc(body)), ConfigError);
  }
  SUBCASE("duplicate name") {
    const std::string p = std::string(R"({"name": "toy", )") + kToyBody + "}";
    CHECK_THROWS_AS(load_profiles(R"({"profiles": [)" + p + "," + p + "]}"), ValidationError);
  }
  SUBCASE("unknown key") {
    CHECK_THROWS_AS(load_profiles(one_profile_doc(std::string(kToyBody) + R"(, "colour": 1)")),
                    ConfigError);
  }
  SUBCASE("duplicate aux kind in the document") {
    const std::string aux =
        R"(, "aux": {"softmax": {"elements_per_s": 1, "pj_per_element": 0},
                     "softmax": {"elements_per_s": 2, "pj_per_element": 0}})";
    CHECK_THROWS_AS(load_profiles(one_profile_doc(std::string(kToyBody) + aux)), ConfigError);
  }
  SUBCASE("malformed text") {
    CHECK_THROWS_AS(load_profiles("{\"profiles\": ["), ConfigError);
  }
}

TEST_CASE("validate_profile") {
  HardwareProfile p = builtin_profiles().lookup("DGX-H100");
  CHECK(validate_profile(p).empty());

  HardwareProfile zero = p;
  zero.compute_tops = 0;
  CHECK(validate_profile(zero).size() == 1);

  HardwareProfile dup = p;
  dup.aux.push_back(dup.aux.front());
  CHECK(validate_profile(dup).size() == 1);

  HardwareProfile negative_energy = p;
  negative_energy.d2h.pj_per_bit = -1;
  CHECK(validate_profile(negative_energy).size() == 1);

  HardwareProfile two = p;
  two.main_memory.bw_gbps = 0;
  two.h2d.bw_gbps = -3;
  CHECK(validate_profile(two).size() == 2);
}

TEST_CASE("validate_profile agrees with load_profiles") {
  Rng rng(11);
  int rejected = 0;
  for (int i = 0; i < 300; ++i) {
    HardwareProfile p = llmsim::testing::random_profile(rng, "p");
    switch (rng.uniform_int(0, 5)) {
      case 0:
        p.compute_tops = -rng.uniform(0.0, 5.0);
        break;
      case 1:
        p.main_memory.bw_gbps = 0.0;
        break;
      case 2:
        p.h2d.pj_per_bit = -1.0;
        break;
      case 3:
        p.aux.front().second.elements_per_s = 0.0;
        break;
      default:
        break;
    }
    const bool valid = validate_profile(p).empty();
    bool loaded = true;
    try {
      load_profiles(R"({"profiles": [)" + serialize_profile(p) + "]}");
    } catch (const Error&) {
      loaded = false;
    }
    CHECK(valid == loaded);
    rejected += valid ? 0 : 1;
  }
  CHECK(rejected > 0);
}

TEST_CASE("scale_profile scales rates only") {
  const HardwareProfile server = builtin_profiles().lookup("PIM-AI server");
  const HardwareProfile e = scale_profile(server, 0.5, "half");
  CHECK(e.name == "half");
  CHECK(e.compute_tops == server.compute_tops * 0.5);
  CHECK(e.main_memory.bw_gbps == server.main_memory.bw_gbps * 0.5);
  CHECK(e.h2d.bw_gbps == server.h2d.bw_gbps * 0.5);
  CHECK(e.d2h.bw_gbps == server.d2h.bw_gbps * 0.5);
  CHECK(e.compute_pj_per_op == server.compute_pj_per_op);
  CHECK(e.main_memory.pj_per_bit == server.main_memory.pj_per_bit);
  CHECK(e.aux_cost(AuxKind::kSoftmax).elements_per_s ==
        server.aux_cost(AuxKind::kSoftmax).elements_per_s * 0.5);
}

TEST_CASE("registry add and upsert") {
  ProfileRegistry reg;
  reg.add(llmsim::testing::toy_profile());
  CHECK_THROWS_AS(reg.add(llmsim::testing::toy_profile()), ValidationError);
  HardwareProfile faster = llmsim::testing::toy_profile();
  faster.compute_tops = 2;
  reg.upsert(faster);
  CHECK(reg.size() == 1);
  CHECK(reg.lookup("toy").compute_tops == 2);
}
