// SPDX-License-Identifier: Apache-2.0

#include "llmsim/costmodel.hpp"

#include <algorithm>

#include "llmsim/error.hpp"

namespace llmsim {

namespace {

constexpr double kTera = 1e12;
constexpr double kGiga = 1e9;

}  // namespace

OpCost eval_node(const OpNode& n, const HardwareProfile& p, const CostOptions& options) {
  OpCost c;
  c.profile = p.name;
  c.kind = n.kind;
  if (n.flops > 0.0) {
    c.compute_s = n.flops / (p.compute_tops * kTera);
    c.compute_pj = n.flops * p.compute_pj_per_op;
  }
  double bytes = n.weight_bytes + n.kv_read_bytes + n.kv_write_bytes;
  if (options.charge_activation_traffic) bytes += n.act_bytes;
  if (bytes > 0.0) {
    c.mem_s = bytes / (p.main_memory.bw_gbps * kGiga);
    c.mem_pj = bytes * 8.0 * p.main_memory.pj_per_bit;
  }
  if (n.act_elements > 0.0) {
    auto kind = aux_kind_for(n.kind);
    if (!kind) {
      throw ValidationError("node '" + n.label + "': kind '" +
                            std::string(to_string(n.kind)) +
                            "' carries aux elements but has no aux cost class");
    }
    const AuxCost& aux = p.aux_cost(*kind);
    c.aux_s = n.act_elements / aux.elements_per_s;
    c.aux_pj = n.act_elements * aux.pj_per_element;
  }
  c.time_s = options.overlap == OverlapMode::kSerialized
                 ? c.compute_s + c.mem_s + c.aux_s
                 : std::max(c.compute_s, c.mem_s) + c.aux_s;
  return c;
}

OpCost eval_transfer(double bytes, Direction direction, const HardwareProfile& p) {
  OpCost c;
  c.profile = p.name;
  c.kind = OpKind::kHostTransfer;
  if (bytes < 0.0) throw ValidationError("transfer: negative byte count");
  if (bytes == 0.0) return c;
  const LinkParams& link = direction == Direction::kH2D ? p.h2d : p.d2h;
  c.transfer_s = bytes / (link.bw_gbps * kGiga);
  c.transfer_pj = bytes * 8.0 * link.pj_per_bit;
  c.time_s = c.transfer_s;
  return c;
}

bool MappingRule::matches(const OpNode& n) const {
  if (!kinds.empty() && std::find(kinds.begin(), kinds.end(), n.kind) == kinds.end()) {
    return false;
  }
  if (layers && (n.layer < layers->first || n.layer > layers->last)) return false;
  return true;
}

MappingScheme MappingScheme::single(std::string profile) {
  MappingScheme m;
  m.default_profile = std::move(profile);
  return m;
}

void PhaseCost::add(const OpCost& c) {
  total_s += c.time_s;
  total_pj += c.total_pj();
  compute_s += c.compute_s;
  mem_s += c.mem_s;
  aux_s += c.aux_s;
  transfer_s += c.transfer_s;
  compute_pj += c.compute_pj;
  mem_pj += c.mem_pj;
  aux_pj += c.aux_pj;
  transfer_pj += c.transfer_pj;
  auto& k = by_kind[c.kind];
  k.time_s += c.time_s;
  k.pj += c.total_pj();
  ops.push_back(c);
}

PhaseCost& PhaseCost::operator+=(const PhaseCost& o) {
  total_s += o.total_s;
  total_pj += o.total_pj;
  compute_s += o.compute_s;
  mem_s += o.mem_s;
  aux_s += o.aux_s;
  transfer_s += o.transfer_s;
  compute_pj += o.compute_pj;
  mem_pj += o.mem_pj;
  aux_pj += o.aux_pj;
  transfer_pj += o.transfer_pj;
  h2d_bytes += o.h2d_bytes;
  d2h_bytes += o.d2h_bytes;
  transfer_legs += o.transfer_legs;
  traffic += o.traffic;
  for (const auto& [kind, b] : o.by_kind) {
    by_kind[kind].time_s += b.time_s;
    by_kind[kind].pj += b.pj;
  }
  return *this;
}

std::vector<const HardwareProfile*> resolve_mapping(const ExecutionGraph& g,
                                                    const MappingScheme& map,
                                                    const ProfileRegistry& reg) {
  const HardwareProfile& fallback = reg.lookup(map.default_profile);
  std::vector<const HardwareProfile*> rule_profiles;
  rule_profiles.reserve(map.rules.size());
  for (const auto& rule : map.rules) rule_profiles.push_back(&reg.lookup(rule.profile));

  std::vector<const HardwareProfile*> out;
  out.reserve(g.nodes.size());
  for (const auto& n : g.nodes) {
    const HardwareProfile* chosen = &fallback;
    for (std::size_t r = 0; r < map.rules.size(); ++r) {
      if (map.rules[r].matches(n)) {
        chosen = rule_profiles[r];
        break;
      }
    }
    out.push_back(chosen);
  }
  return out;
}

PhaseCost eval_graph(const ExecutionGraph& g, const MappingScheme& map,
                     const ProfileRegistry& reg, const GraphEvalOptions& options) {
  const std::size_t n = g.nodes.size();
  for (std::size_t s : map.sync_points) {
    if (s > n) {
      throw ValidationError("sync point " + std::to_string(s) +
                            " is not a node boundary (graph has " + std::to_string(n) +
                            " nodes)");
    }
  }
  const auto profiles = resolve_mapping(g, map, reg);

  PhaseCost cost;
  cost.traffic = graph_totals(g);
  if (n == 0) return cost;

  const double act_size = options.activation_bits / 8.0;
  const double hidden = static_cast<double>(g.batch) *
                        static_cast<double>(g.new_tokens) *
                        static_cast<double>(g.d_model) * act_size;
  auto transfer = [&](double bytes, Direction dir, const HardwareProfile& p) {
    cost.add(eval_transfer(bytes, dir, p));
    (dir == Direction::kH2D ? cost.h2d_bytes : cost.d2h_bytes) += bytes;
    ++cost.transfer_legs;
  };

  if (options.transfer_at_start) {
    transfer(map.h2d_payload_bytes.value_or(hidden), Direction::kH2D, *profiles.front());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const bool cut = std::find(map.sync_points.begin(), map.sync_points.end(), i) !=
                       map.sync_points.end();
      if (cut || profiles[i] != profiles[i - 1]) {
        // Devices are not peer-connected: A -> HOST -> B.
        transfer(hidden, Direction::kD2H, *profiles[i - 1]);
        transfer(hidden, Direction::kH2D, *profiles[i]);
      }
    }
    cost.add(eval_node(g.nodes[i], *profiles[i], options.cost));
  }
  if (options.transfer_at_end) {
    const double last_hidden =
        static_cast<double>(g.batch) * static_cast<double>(g.d_model) * act_size;
    transfer(map.d2h_payload_bytes.value_or(last_hidden) + options.extra_d2h_bytes,
             Direction::kD2H, *profiles.back());
  } else if (options.extra_d2h_bytes > 0.0) {
    transfer(options.extra_d2h_bytes, Direction::kD2H, *profiles.back());
  }
  return cost;
}

}  // namespace llmsim
