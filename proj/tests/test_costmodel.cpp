// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "llmsim/costmodel.hpp"
#include "llmsim/error.hpp"
#include "support.hpp"

using namespace llmsim;
using llmsim::testing::close_rel;
using llmsim::testing::Rng;
using llmsim::testing::toy_model;
using llmsim::testing::toy_profile;

namespace {

ProfileRegistry toy_registry() {
  ProfileRegistry reg = builtin_profiles();
  reg.add(toy_profile());
  return reg;
}

ProfileRegistry single(const HardwareProfile& p) {
  ProfileRegistry reg;
  reg.add(p);
  return reg;
}

}  // namespace

TEST_CASE("eval_node arithmetic") {
  const HardwareProfile chip = builtin_profiles().lookup("PIM-AI chip");

  OpNode compute;
  compute.flops = 1e12;
  const OpCost c = eval_node(compute, chip);
  CHECK(c.compute_s == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(c.compute_pj == doctest::Approx(4e11).epsilon(1e-15));
  CHECK(c.mem_s == 0.0);
  CHECK(c.time_s == c.compute_s);

  OpNode memory;
  memory.weight_bytes = 1e9;
  const OpCost m = eval_node(memory, chip);
  CHECK(m.mem_s == doctest::Approx(1e9 / 102.4e9).epsilon(1e-15));
  CHECK(m.mem_pj == doctest::Approx(7.6e9).epsilon(1e-15));
  CHECK(m.compute_s == 0.0);

  const OpCost empty = eval_node(OpNode{}, chip);
  CHECK(empty.time_s == 0.0);
  CHECK(empty.total_pj() == 0.0);

  OpNode softmax;
  softmax.kind = OpKind::kSoftmax;
  softmax.act_elements = 625e9;
  const OpCost s = eval_node(softmax, chip);
  CHECK(s.aux_s == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.aux_pj == doctest::Approx(625e9 * 0.4).epsilon(1e-15));

  OpNode bogus;
  bogus.kind = OpKind::kMatmul;
  bogus.act_elements = 1;
  CHECK_THROWS_AS(eval_node(bogus, chip), ValidationError);

  HardwareProfile no_aux = chip;
  no_aux.aux.clear();
  CHECK_THROWS_AS(eval_node(softmax, no_aux), ValidationError);
}

TEST_CASE("overlap modes") {
  const HardwareProfile chip = builtin_profiles().lookup("PIM-AI chip");
  OpNode n;
  n.kind = OpKind::kMatmul;
  n.flops = 1e12;
  n.weight_bytes = 1e9;
  const OpCost serial = eval_node(n, chip);
  const OpCost roof = eval_node(n, chip, {OverlapMode::kRooflineMax, false});
  CHECK(serial.time_s == serial.compute_s + serial.mem_s);
  CHECK(roof.time_s == std::max(roof.compute_s, roof.mem_s));
  CHECK(roof.total_pj() == serial.total_pj());
}

TEST_CASE("activation traffic switch") {
  const HardwareProfile chip = builtin_profiles().lookup("PIM-AI chip");
  OpNode n;
  n.act_bytes = 1e6;
  CHECK(eval_node(n, chip).mem_s == 0.0);
  CHECK(eval_node(n, chip, {OverlapMode::kSerialized, true}).mem_s == 1e6 / 102.4e9);
}

TEST_CASE("eval_transfer arithmetic") {
  const ProfileRegistry reg = builtin_profiles();
  CHECK(eval_transfer(0, Direction::kH2D, reg.lookup("DGX-H100")).time_s == 0.0);
  CHECK(eval_transfer(0, Direction::kH2D, reg.lookup("DGX-H100")).total_pj() == 0.0);

  const OpCost h2d = eval_transfer(1e6, Direction::kH2D, reg.lookup("PIM-AI server"));
  CHECK(h2d.transfer_s == doctest::Approx(1e6 / 22e9).epsilon(1e-15));
  CHECK(h2d.transfer_pj == doctest::Approx(8e6 * 1920).epsilon(1e-15));
  CHECK(h2d.transfer_pj * 1e-12 == doctest::Approx(15.36e-3).epsilon(1e-12));

  const OpCost d2h = eval_transfer(1e6, Direction::kD2H, reg.lookup("DGX-H100"));
  CHECK(d2h.transfer_s == 1e6 / 450e9);
  CHECK(d2h.transfer_pj * 1e-12 == doctest::Approx(0.32e-3).epsilon(1e-12));

  CHECK_THROWS_AS(eval_transfer(-1, Direction::kD2H, reg.lookup("DGX-H100")), ValidationError);
}

TEST_CASE("single-profile graph is the node sum plus boundary transfers") {
  const ProfileRegistry reg = toy_registry();
  const ExecutionGraph g = build_decode_graph(toy_model(), {}, 2, 5);
  const PhaseCost cost = eval_graph(g, MappingScheme::single("DGX-H100"), reg);

  const HardwareProfile& dgx = reg.lookup("DGX-H100");
  double time = 0.0;
  double pj = 0.0;
  for (const auto& n : g.nodes) {
    const OpCost c = eval_node(n, dgx);
    time += c.time_s;
    pj += c.total_pj();
  }
  const OpCost in = eval_transfer(2 * 64 * 2, Direction::kH2D, dgx);
  const OpCost out = eval_transfer(2 * 64 * 2, Direction::kD2H, dgx);
  CHECK(cost.transfer_legs == 2);
  CHECK(close_rel(cost.total_s, time + in.time_s + out.time_s, 1e-14));
  CHECK(close_rel(cost.total_pj, pj + in.total_pj() + out.total_pj(), 1e-14));
  CHECK(cost.ops.size() == g.nodes.size() + 2);
}

TEST_CASE("toy decode step against the spreadsheet fold") {
  const ProfileRegistry reg = toy_registry();
  const HardwareProfile& toy = reg.lookup("toy");
  for (std::int64_t context : {0, 1, 7, 100}) {
    for (std::int64_t batch : {1, 4}) {
      const auto g = build_decode_graph(toy_model(), {}, batch, context);
      const PhaseCost cost = eval_graph(g, MappingScheme::single("toy"), reg);
      const auto o = llmsim::testing::pass_oracle(toy_model(), {}, batch, context, 1);
      CHECK(close_rel(cost.total_s, llmsim::testing::pass_time(o, toy), 1e-12));
      CHECK(cost.total_pj == 0.0);
    }
  }
  const ProfileRegistry builtins = builtin_profiles();
  for (const auto& p : builtins.profiles()) {
    const auto g = build_prefill_graph(toy_model(), {4, 16, 16}, 2, 9);
    const PhaseCost cost = eval_graph(g, MappingScheme::single(p.name), reg);
    const auto o = llmsim::testing::pass_oracle(toy_model(), {4, 16, 16}, 2, 0, 9);
    CHECK(close_rel(cost.total_s, llmsim::testing::pass_time(o, p), 1e-12));
    CHECK(close_rel(cost.total_pj, llmsim::testing::pass_energy_pj(o, p), 1e-12));
  }
}

TEST_CASE("two-profile split adds two transfer legs") {
  const ProfileRegistry reg = toy_registry();
  const ExecutionGraph g = build_decode_graph(toy_model(), {}, 1, 3);
  const PhaseCost one = eval_graph(g, MappingScheme::single("DGX-H100"), reg);

  MappingScheme split = MappingScheme::single("DGX-H100");
  split.rules.push_back({{}, LayerRange{1, 2}, "PIM-AI server"});
  const PhaseCost two = eval_graph(g, split, reg);
  CHECK(two.transfer_legs == one.transfer_legs + 2);

  const double hidden = 64 * 2;
  const auto& dgx = reg.lookup("DGX-H100");
  const auto& pim = reg.lookup("PIM-AI server");
  double expected = eval_transfer(hidden, Direction::kH2D, dgx).time_s +
                    eval_transfer(hidden, Direction::kD2H, dgx).time_s +
                    eval_transfer(hidden, Direction::kH2D, pim).time_s +
                    eval_transfer(hidden, Direction::kD2H, pim).time_s;
  for (const auto& n : g.nodes) {
    expected += eval_node(n, n.layer >= 1 ? pim : dgx).time_s;
  }
  CHECK(close_rel(two.total_s, expected, 1e-14));
}

TEST_CASE("sync points and mapping errors") {
  const ProfileRegistry reg = toy_registry();
  const ExecutionGraph g = build_decode_graph(toy_model(), {}, 1, 0);

  MappingScheme cut = MappingScheme::single("toy");
  cut.sync_points = {5};
  CHECK(eval_graph(g, cut, reg).transfer_legs == 4);

  cut.sync_points = {g.nodes.size() + 1};
  CHECK_THROWS_AS(eval_graph(g, cut, reg), ValidationError);

  CHECK_THROWS_AS(eval_graph(g, MappingScheme::single("missing"), reg), LookupError);
  MappingScheme bad_rule = MappingScheme::single("toy");
  bad_rule.rules.push_back({{OpKind::kSoftmax}, std::nullopt, "missing"});
  CHECK_THROWS_AS(eval_graph(g, bad_rule, reg), LookupError);
}

TEST_CASE("mapping rules by kind") {
  const ProfileRegistry reg = toy_registry();
  const ExecutionGraph g = build_decode_graph(toy_model(), {}, 1, 0);
  MappingScheme m = MappingScheme::single("DGX-H100");
  m.rules.push_back({{OpKind::kSoftmax}, std::nullopt, "toy"});
  const auto resolved = resolve_mapping(g, m, reg);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    CHECK(resolved[i]->name == (g.nodes[i].kind == OpKind::kSoftmax ? "toy" : "DGX-H100"));
  }
}

TEST_CASE("PhaseCost additivity") {
  const ProfileRegistry reg = builtin_profiles();
  const PhaseCost c =
      eval_graph(build_prefill_graph(toy_model(), {}, 3, 11), MappingScheme::single("A17 Pro"), reg);
  double time = 0.0;
  double pj = 0.0;
  double by_kind_pj = 0.0;
  for (const auto& op : c.ops) {
    time += op.time_s;
    pj += op.total_pj();
  }
  for (const auto& [kind, b] : c.by_kind) by_kind_pj += b.pj;
  CHECK(c.total_s == time);
  CHECK(c.total_pj == pj);
  CHECK(close_rel(c.total_pj, c.compute_pj + c.mem_pj + c.aux_pj + c.transfer_pj, 1e-14));
  CHECK(close_rel(c.total_s, c.compute_s + c.mem_s + c.aux_s + c.transfer_s, 1e-14));
  CHECK(close_rel(by_kind_pj, c.total_pj, 1e-14));
}

TEST_CASE("scaling properties over random profiles") {
  Rng rng(29);
  for (int i = 0; i < 100; ++i) {
    const HardwareProfile p = llmsim::testing::random_profile(rng, "p");
    const ModelConfig m = llmsim::testing::random_model(rng);
    const DataFormatPolicy f{rng.bits(), rng.bits(), rng.bits()};
    const auto g = build_decode_graph(m, f, rng.uniform_int(1, 4), rng.uniform_int(0, 50));

    HardwareProfile fast_mem = p;
    fast_mem.main_memory.bw_gbps *= 2;
    const PhaseCost base = eval_graph(g, MappingScheme::single("p"), single(p));
    const PhaseCost doubled = eval_graph(g, MappingScheme::single("p"), single(fast_mem));
    for (std::size_t k = 0; k < base.ops.size(); ++k) {
      CHECK(doubled.ops[k].mem_s == base.ops[k].mem_s / 2);
      CHECK(doubled.ops[k].compute_s == base.ops[k].compute_s);
      CHECK(doubled.ops[k].total_pj() == base.ops[k].total_pj());
    }
    CHECK(doubled.mem_s == doctest::Approx(base.mem_s / 2).epsilon(1e-14));
    CHECK(doubled.total_pj == base.total_pj);

    const double k = rng.log_uniform(0.01, 100.0);
    const PhaseCost scaled =
        eval_graph(g, MappingScheme::single("p"), single(scale_profile(p, k, "p")));
    CHECK(close_rel(scaled.total_s, base.total_s / k, 1e-12));
    CHECK(scaled.compute_pj == base.compute_pj);
    CHECK(scaled.mem_pj == base.mem_pj);
    CHECK(scaled.aux_pj == base.aux_pj);
    CHECK(scaled.transfer_pj == base.transfer_pj);
  }
}

TEST_CASE("decode step cost is monotone in context") {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    const HardwareProfile p = llmsim::testing::random_profile(rng, "p");
    const ProfileRegistry reg = single(p);
    const ModelConfig m = llmsim::testing::random_model(rng);
    const std::int64_t b = rng.uniform_int(1, 4);
    double prev_s = 0.0;
    double prev_pj = 0.0;
    for (std::int64_t c = 0; c < 200; c += 1 + c / 4) {
      const PhaseCost cost = eval_graph(build_decode_graph(m, {}, b, c),
                                        MappingScheme::single("p"), reg);
      CHECK(cost.total_s >= prev_s);
      CHECK(cost.total_pj >= prev_pj);
      prev_s = cost.total_s;
      prev_pj = cost.total_pj;
    }
  }
}

TEST_CASE("zero traffic means zero memory energy") {
  ExecutionGraph g;
  g.batch = 1;
  g.new_tokens = 1;
  g.d_model = 8;
  g.n_layers = 1;
  OpNode a;
  a.kind = OpKind::kMatmul;
  a.flops = 100;
  OpNode b;
  b.kind = OpKind::kSoftmax;
  b.act_elements = 10;
  g.nodes = {a, b};
  const ProfileRegistry builtins = builtin_profiles();
  for (const auto& p : builtins.profiles()) {
    const PhaseCost c = eval_graph(g, MappingScheme::single(p.name), builtin_profiles());
    CHECK(c.mem_pj == 0.0);
    CHECK(c.mem_s == 0.0);
  }
}
