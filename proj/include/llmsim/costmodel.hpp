// SPDX-License-Identifier: Apache-2.0
//
// Time and energy of execution graphs on hardware profiles. The default
// model is worst case: compute, memory and auxiliary time of a node are
// summed, and host transfers are never overlapped with work.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llmsim/graph.hpp"
#include "llmsim/profiles.hpp"

namespace llmsim {

enum class OverlapMode {
  kSerialized,   // node time = compute + memory + aux
  kRooflineMax,  // node time = max(compute, memory) + aux
};

struct CostOptions {
  OverlapMode overlap = OverlapMode::kSerialized;
  // Charge intermediate tensors to main memory at activation_bits.
  bool charge_activation_traffic = false;
};

enum class Direction { kH2D, kD2H };

struct OpCost {
  std::string profile;
  OpKind kind = OpKind::kMatmul;
  double time_s = 0.0;
  double compute_s = 0.0;
  double mem_s = 0.0;
  double aux_s = 0.0;
  double transfer_s = 0.0;
  double compute_pj = 0.0;
  double mem_pj = 0.0;
  double aux_pj = 0.0;
  double transfer_pj = 0.0;

  double total_pj() const { return compute_pj + mem_pj + aux_pj + transfer_pj; }
};

OpCost eval_node(const OpNode& n, const HardwareProfile& p,
                 const CostOptions& options = {});

OpCost eval_transfer(double bytes, Direction direction, const HardwareProfile& p);

struct LayerRange {
  int first = 0;
  int last = 0;  // inclusive
};

struct MappingRule {
  std::vector<OpKind> kinds;        // empty matches every kind
  std::optional<LayerRange> layers; // empty matches every layer
  std::string profile;

  bool matches(const OpNode& n) const;
};

struct MappingScheme {
  std::string default_profile;
  std::vector<MappingRule> rules;  // first match wins
  // Mid-graph cuts: boundary index i lies between node i-1 and node i.
  std::vector<std::size_t> sync_points;
  std::optional<double> h2d_payload_bytes;
  std::optional<double> d2h_payload_bytes;

  static MappingScheme single(std::string profile);
};

struct GraphEvalOptions {
  CostOptions cost;
  bool transfer_at_start = true;
  bool transfer_at_end = true;
  int activation_bits = 16;
  // Extra D2H bytes charged at graph end (on top of the end payload).
  double extra_d2h_bytes = 0.0;
};

struct CostBreakdown {
  double time_s = 0.0;
  double pj = 0.0;
};

struct PhaseCost {
  double total_s = 0.0;
  double total_pj = 0.0;
  double compute_s = 0.0;
  double mem_s = 0.0;
  double aux_s = 0.0;
  double transfer_s = 0.0;
  double compute_pj = 0.0;
  double mem_pj = 0.0;
  double aux_pj = 0.0;
  double transfer_pj = 0.0;
  double h2d_bytes = 0.0;
  double d2h_bytes = 0.0;
  int transfer_legs = 0;
  GraphTotals traffic;
  std::map<OpKind, CostBreakdown> by_kind;
  std::vector<OpCost> ops;

  void add(const OpCost& c);
  PhaseCost& operator+=(const PhaseCost& o);
};

// Resolves the profile for every node; throws LookupError for names the
// registry does not hold.
std::vector<const HardwareProfile*> resolve_mapping(const ExecutionGraph& g,
                                                    const MappingScheme& map,
                                                    const ProfileRegistry& reg);

PhaseCost eval_graph(const ExecutionGraph& g, const MappingScheme& map,
                     const ProfileRegistry& reg, const GraphEvalOptions& options = {});

}  // namespace llmsim
