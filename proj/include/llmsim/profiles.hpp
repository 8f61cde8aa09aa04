// SPDX-License-Identifier: Apache-2.0
//
// Hardware profiles: the per-device rate and energy parameters every cost
// in the simulator is derived from. Units are decimal throughout:
// 1 TOPS = 1e12 ops/s, 1 GB/s = 1e9 bytes/s.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace llmsim {

// Auxiliary (non-GEMM) function classes with their own throughput/energy.
enum class AuxKind { kSoftmax, kNorm, kActivation, kEmbedding };

inline constexpr AuxKind kAllAuxKinds[] = {AuxKind::kSoftmax, AuxKind::kNorm,
                                           AuxKind::kActivation,
                                           AuxKind::kEmbedding};

std::string_view to_string(AuxKind kind);
std::optional<AuxKind> parse_aux_kind(std::string_view text);

struct AuxCost {
  double elements_per_s = 0.0;
  double pj_per_element = 0.0;

  bool operator==(const AuxCost&) const = default;
};

struct LinkParams {
  double bw_gbps = 0.0;
  double pj_per_bit = 0.0;

  bool operator==(const LinkParams&) const = default;
};

struct HardwareProfile {
  std::string name;
  double compute_tops = 0.0;
  double compute_pj_per_op = 0.0;
  LinkParams main_memory;
  LinkParams h2d;
  LinkParams d2h;
  // Kept as a list so that duplicate entries stay representable and can be
  // reported by validate_profile().
  std::vector<std::pair<AuxKind, AuxCost>> aux;

  // Throws ValidationError when the kind has no entry.
  const AuxCost& aux_cost(AuxKind kind) const;

  bool operator==(const HardwareProfile&) const = default;
};

// Default auxiliary cost: compute_tops*1e12/8 elements/s at compute_pj_per_op
// pJ per element.
AuxCost default_aux_cost(const HardwareProfile& p);

// Returns a copy with every missing aux kind filled from default_aux_cost().
HardwareProfile with_default_aux(HardwareProfile p);

// Returns a copy whose rates (compute, memory and link bandwidths, aux
// throughputs) are multiplied by `factor`. Energies are unchanged.
HardwareProfile scale_profile(const HardwareProfile& p, double factor,
                              std::string name);

struct Violation {
  std::string profile;
  std::string field;
  std::string message;

  std::string to_string() const;
};

std::vector<Violation> validate_profile(const HardwareProfile& p);

class ProfileRegistry {
 public:
  ProfileRegistry() = default;

  // Throws ValidationError on a duplicate name or an invalid profile.
  void add(HardwareProfile p);
  // Replaces the profile with the same name in place, else appends.
  void upsert(HardwareProfile p);

  const HardwareProfile& lookup(std::string_view name) const;
  const HardwareProfile* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  const std::vector<HardwareProfile>& profiles() const { return profiles_; }
  std::size_t size() const { return profiles_.size(); }

 private:
  std::vector<HardwareProfile> profiles_;
};

// The six reference devices, aux costs filled with defaults.
ProfileRegistry builtin_profiles();

// Parses a profile document ({"profiles": [...]}). With merge_builtins the
// declared profiles override builtins by name and new names are appended.
ProfileRegistry load_profiles(std::string_view document,
                              bool merge_builtins = false);

std::string serialize_profile(const HardwareProfile& p);
std::string serialize_profiles(const ProfileRegistry& registry);

}  // namespace llmsim
