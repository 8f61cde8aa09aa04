// SPDX-License-Identifier: Apache-2.0

#include "llmsim/profiles.hpp"

#include <cmath>

#include "codec.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

using detail::Json;

std::string_view to_string(AuxKind kind) {
  switch (kind) {
    case AuxKind::kSoftmax:
      return "softmax";
    case AuxKind::kNorm:
      return "norm";
    case AuxKind::kActivation:
      return "activation";
    case AuxKind::kEmbedding:
      return "embedding";
  }
  return "?";
}

std::optional<AuxKind> parse_aux_kind(std::string_view text) {
  for (AuxKind k : kAllAuxKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

const AuxCost& HardwareProfile::aux_cost(AuxKind kind) const {
  for (const auto& [k, cost] : aux) {
    if (k == kind) return cost;
  }
  throw ValidationError("profile '" + name + "': no aux cost for kind '" +
                        std::string(to_string(kind)) + "'");
}

AuxCost default_aux_cost(const HardwareProfile& p) {
  return {p.compute_tops * 1e12 / 8.0, p.compute_pj_per_op};
}

HardwareProfile with_default_aux(HardwareProfile p) {
  for (AuxKind kind : kAllAuxKinds) {
    bool present = false;
    for (const auto& entry : p.aux) present = present || entry.first == kind;
    if (!present) p.aux.emplace_back(kind, default_aux_cost(p));
  }
  return p;
}

HardwareProfile scale_profile(const HardwareProfile& p, double factor,
                              std::string name) {
  HardwareProfile out = p;
  out.name = std::move(name);
  out.compute_tops *= factor;
  out.main_memory.bw_gbps *= factor;
  out.h2d.bw_gbps *= factor;
  out.d2h.bw_gbps *= factor;
  for (auto& entry : out.aux) entry.second.elements_per_s *= factor;
  return out;
}

std::string Violation::to_string() const {
  return "profile '" + profile + "': field '" + field + "': " + message;
}

std::vector<Violation> validate_profile(const HardwareProfile& p) {
  std::vector<Violation> out;
  auto rate = [&](double v, const char* field) {
    if (!(std::isfinite(v) && v > 0.0)) out.push_back({p.name, field, "must be > 0"});
  };
  auto energy = [&](double v, const char* field) {
    if (!(std::isfinite(v) && v >= 0.0)) {
      out.push_back({p.name, field, "must be >= 0"});
    }
  };
  if (p.name.empty()) out.push_back({p.name, "name", "must not be empty"});
  rate(p.compute_tops, "compute.tops");
  energy(p.compute_pj_per_op, "compute.pj_per_op");
  rate(p.main_memory.bw_gbps, "main_memory.bw_gbps");
  energy(p.main_memory.pj_per_bit, "main_memory.pj_per_bit");
  rate(p.h2d.bw_gbps, "h2d.bw_gbps");
  energy(p.h2d.pj_per_bit, "h2d.pj_per_bit");
  rate(p.d2h.bw_gbps, "d2h.bw_gbps");
  energy(p.d2h.pj_per_bit, "d2h.pj_per_bit");
  for (std::size_t i = 0; i < p.aux.size(); ++i) {
    const auto& [kind, cost] = p.aux[i];
    std::string base = "aux." + std::string(llmsim::to_string(kind));
    bool duplicate = false;
    for (std::size_t j = 0; j < i; ++j) duplicate = duplicate || p.aux[j].first == kind;
    if (duplicate) {
      out.push_back({p.name, base, "duplicate aux kind"});
      continue;
    }
    if (!(std::isfinite(cost.elements_per_s) && cost.elements_per_s > 0.0)) {
      out.push_back({p.name, base + ".elements_per_s", "must be > 0"});
    }
    if (!(std::isfinite(cost.pj_per_element) && cost.pj_per_element >= 0.0)) {
      out.push_back({p.name, base + ".pj_per_element", "must be >= 0"});
    }
  }
  return out;
}

void ProfileRegistry::add(HardwareProfile p) {
  if (auto v = validate_profile(p); !v.empty()) throw ValidationError(v.front().to_string());
  if (contains(p.name)) {
    throw ValidationError("profile '" + p.name + "': duplicate name");
  }
  profiles_.push_back(std::move(p));
}

void ProfileRegistry::upsert(HardwareProfile p) {
  if (auto v = validate_profile(p); !v.empty()) throw ValidationError(v.front().to_string());
  for (auto& existing : profiles_) {
    if (existing.name == p.name) {
      existing = std::move(p);
      return;
    }
  }
  profiles_.push_back(std::move(p));
}

const HardwareProfile* ProfileRegistry::find(std::string_view name) const {
  for (const auto& p : profiles_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const HardwareProfile& ProfileRegistry::lookup(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw LookupError("unknown profile '" + std::string(name) + "'");
}

ProfileRegistry builtin_profiles() {
  struct Row {
    const char* name;
    double tops, pj_op, mem_bw, mem_pj, h2d_bw, h2d_pj, d2h_bw, d2h_pj;
  };
  // clang-format off
  static constexpr Row kTable[] = {
    {"PIM-AI chip",       5,    0.4, 102.4,   0.95, 12.8, 20,   12.8, 20},
    {"PIM-AI server",     3072, 0.5, 39321.6, 0.95, 22,   1920, 528,  50},
    {"A17 Pro",           17,   0.4, 51.2,    20,   51.2, 20,   51.2, 20},
    {"Snapdragon 8 Gen3", 17,   0.4, 77,      10,   77,   10,   77,   10},
    {"Dimensity 9300",    16,   0.4, 76.8,    10,   76.8, 10,   76.8, 10},
    {"DGX-H100",          7916, 0.5, 26800,   7,    450,  280,  450,  40},
  };
  // clang-format on
  ProfileRegistry reg;
  for (const Row& r : kTable) {
    HardwareProfile p;
    p.name = r.name;
    p.compute_tops = r.tops;
    p.compute_pj_per_op = r.pj_op;
    p.main_memory = {r.mem_bw, r.mem_pj};
    p.h2d = {r.h2d_bw, r.h2d_pj};
    p.d2h = {r.d2h_bw, r.d2h_pj};
    reg.add(with_default_aux(std::move(p)));
  }
  return reg;
}

namespace {

Json link_to_json(const LinkParams& link) {
  Json j = Json::object();
  j["bw_gbps"] = link.bw_gbps;
  j["pj_per_bit"] = link.pj_per_bit;
  return j;
}

}  // namespace

Json detail::profile_to_json(const HardwareProfile& p) {
  Json j = Json::object();
  j["name"] = p.name;
  j["compute"] = {{"tops", p.compute_tops}, {"pj_per_op", p.compute_pj_per_op}};
  j["main_memory"] = link_to_json(p.main_memory);
  j["h2d"] = link_to_json(p.h2d);
  j["d2h"] = link_to_json(p.d2h);
  Json aux = Json::object();
  for (const auto& [kind, cost] : p.aux) {
    std::string key(to_string(kind));
    if (aux.contains(key)) continue;
    aux[key] = {{"elements_per_s", cost.elements_per_s},
                {"pj_per_element", cost.pj_per_element}};
  }
  j["aux"] = std::move(aux);
  return j;
}

namespace {

LinkParams link_from_json(const Json& obj, std::string_view key,
                          const std::string& path) {
  const Json& link = detail::require_object(obj, key, path);
  std::string sub = detail::join_path(path, key);
  detail::check_keys(link, {"bw_gbps", "pj_per_bit"}, sub);
  return {detail::get_number(link, "bw_gbps", sub),
          detail::get_number(link, "pj_per_bit", sub)};
}

}  // namespace

HardwareProfile detail::profile_from_json(const Json& obj, const std::string& path) {
  detail::check_keys(obj, {"name", "compute", "main_memory", "h2d", "d2h", "aux"},
                     path);
  HardwareProfile p;
  p.name = detail::get_string(obj, "name", path);
  const std::string base = "profiles." + p.name;
  const Json& compute = detail::require_object(obj, "compute", base);
  detail::check_keys(compute, {"tops", "pj_per_op"}, base + ".compute");
  p.compute_tops = detail::get_number(compute, "tops", base + ".compute");
  p.compute_pj_per_op = detail::get_number(compute, "pj_per_op", base + ".compute");
  p.main_memory = link_from_json(obj, "main_memory", base);
  p.h2d = link_from_json(obj, "h2d", base);
  p.d2h = link_from_json(obj, "d2h", base);
  if (obj.contains("aux")) {
    const Json& aux = detail::require_object(obj, "aux", base);
    for (const auto& [key, value] : aux.items()) {
      std::string sub = base + ".aux." + key;
      auto kind = parse_aux_kind(key);
      if (!kind) throw ConfigError("field '" + sub + "': unknown aux kind");
      if (!value.is_object()) throw ConfigError("field '" + sub + "': expected object");
      detail::check_keys(value, {"elements_per_s", "pj_per_element"}, sub);
      p.aux.emplace_back(*kind, AuxCost{detail::get_number(value, "elements_per_s", sub),
                                        detail::get_number(value, "pj_per_element", sub)});
    }
  }
  return with_default_aux(std::move(p));
}



ProfileRegistry load_profiles(std::string_view document, bool merge_builtins) {
  Json doc = detail::parse_strict(document, "profile document");
  detail::check_keys(doc, {"profiles"}, "");
  const Json& list = detail::require_array(doc, "profiles", "");

  ProfileRegistry declared;
  for (std::size_t i = 0; i < list.size(); ++i) {
    HardwareProfile p =
        detail::profile_from_json(list[i], "profiles[" + std::to_string(i) + "]");
    if (auto v = validate_profile(p); !v.empty()) {
      throw ValidationError(v.front().to_string());
    }
    if (declared.contains(p.name)) {
      throw ValidationError("profile '" + p.name + "': field 'name': duplicate name");
    }
    declared.add(std::move(p));
  }
  if (!merge_builtins) return declared;

  ProfileRegistry merged = builtin_profiles();
  for (const auto& p : declared.profiles()) merged.upsert(p);
  return merged;
}

std::string serialize_profile(const HardwareProfile& p) {
  return detail::profile_to_json(p).dump(2);
}

std::string serialize_profiles(const ProfileRegistry& registry) {
  Json list = Json::array();
  for (const auto& p : registry.profiles()) list.push_back(detail::profile_to_json(p));
  Json doc = Json::object();
  doc["profiles"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace llmsim
