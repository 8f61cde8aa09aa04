// SPDX-License-Identifier: Apache-2.0
//
// Whole-query simulation: prefill plus autoregressive decode on one or more
// identical engines, the derived serving metrics, and cost of ownership.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmsim/costmodel.hpp"
#include "llmsim/models.hpp"
#include "llmsim/profiles.hpp"

namespace llmsim {

struct Workload {
  std::int64_t batch = 1;     // queries processed together on one engine
  std::int64_t n_input = 1;   // prompt tokens
  std::int64_t n_output = 1;  // generated tokens, the first one ends prefill

  bool operator==(const Workload&) const = default;
};

void validate(const Workload& w);

struct DeploymentSpec {
  std::string label;
  MappingScheme mapping;
  // One engine owns this fraction of every mapped profile's rates.
  double engine_scale = 1.0;
  std::int64_t n_engines = 1;
  double orchestration_s = 0.0;
};

void validate(const DeploymentSpec& d);

enum class TransferMode { kPerStep, kPerQuery };
enum class OrchestrationMode { kPerQuery, kPerStep };

struct RunOptions {
  CostOptions cost;
  TransferMode transfers = TransferMode::kPerStep;
  OrchestrationMode orchestration = OrchestrationMode::kPerQuery;

  bool operator==(const RunOptions& o) const {
    return cost.overlap == o.cost.overlap &&
           cost.charge_activation_traffic == o.cost.charge_activation_traffic &&
           transfers == o.transfers && orchestration == o.orchestration;
  }
};

// Per-engine quantities unless the name says otherwise.
struct InferenceMetrics {
  double ttft_s = 0.0;
  double prefill_s = 0.0;        // prefill graph plus its transfers
  double prefill_j = 0.0;        // same scope as prefill_s
  double encode_energy_j = 0.0;  // prefill_j per query
  double decode_s = 0.0;
  double decode_j = 0.0;
  std::int64_t decode_steps = 0;
  // Absent when n_output == 1.
  std::optional<double> tokens_per_s;  // aggregate over batch and engines
  std::optional<double> energy_per_token_j;
  double orchestration_s = 0.0;
  double query_latency_s = 0.0;
  double qps = 0.0;  // all engines
  double epq_j = 0.0;
  double avg_power_w = 0.0;  // all engines
  double total_energy_j = 0.0;  // all engines

  // Energy breakdown over the whole query, one engine.
  double compute_j = 0.0;
  double mem_j = 0.0;
  double aux_j = 0.0;
  double transfer_j = 0.0;
  // Traffic over the whole query, one engine.
  double weight_bytes = 0.0;
  double kv_read_bytes = 0.0;
  double kv_write_bytes = 0.0;
  double h2d_bytes = 0.0;
  double d2h_bytes = 0.0;
  double flops = 0.0;
};

InferenceMetrics run_inference(const ModelConfig& m, const DataFormatPolicy& fmt,
                               const Workload& w, const DeploymentSpec& d,
                               const ProfileRegistry& reg, const RunOptions& options = {});

struct FitReport {
  double weight_bytes = 0.0;
  double kv_bytes_per_query = 0.0;  // (n_input + n_output) tokens
  double required_bytes = 0.0;      // at the workload's batch
  double capacity_bytes = 0.0;
  bool fits = false;
  std::int64_t max_batch = 0;
};

FitReport validate_fit(const ModelConfig& m, const DataFormatPolicy& fmt,
                       const Workload& w, double capacity_bytes);

struct CostParams {
  double capex_usd = 0.0;
  double usd_per_kwh = 0.0;
  double horizon_hours = 3.0 * 365.0 * 24.0;

  bool operator==(const CostParams&) const = default;
};

// (capex + energy cost over the horizon) / qps.
double tco_per_qps(const InferenceMetrics& metrics, const CostParams& c);

struct ScenarioSpec {
  std::string scenario;  // case label shared by the platforms being compared
  std::string model;
  DataFormatPolicy format;
  Workload workload;
  DeploymentSpec deployment;
  std::optional<CostParams> cost_params;
  RunOptions options;
};

struct RunRecord {
  std::string scenario;
  std::string model;
  DataFormatPolicy format;
  Workload workload;
  std::string deployment;
  InferenceMetrics metrics;
  std::optional<double> tco_per_qps_usd;
};

RunRecord run_scenario(const ScenarioSpec& spec, const std::vector<ModelConfig>& models,
                       const ProfileRegistry& reg);

// Evaluates independent scenarios concurrently; results keep input order.
std::vector<RunRecord> run_scenarios(const std::vector<ScenarioSpec>& specs,
                                     const std::vector<ModelConfig>& models,
                                     const ProfileRegistry& reg, unsigned threads = 0);

enum class Suite { kCloud, kMobile };

std::optional<Suite> parse_suite(std::string_view text);
std::string_view to_string(Suite suite);

// Deployment labels used by the builtin suites.
inline constexpr std::string_view kDgxLabel = "DGX-H100";
inline constexpr std::string_view kPimCloudLabel = "4x PIM-AI server";
inline constexpr std::string_view kPimMobileLabel = "PIM-AI chip";

std::vector<ScenarioSpec> builtin_scenarios(Suite suite);

// A scenario document carries optional profile and model definitions
// (merged over the builtins by name) plus a scenario list.
struct ScenarioDocument {
  ProfileRegistry profiles;
  std::vector<ModelConfig> models;
  std::vector<ScenarioSpec> scenarios;
};

ScenarioDocument load_scenario_document(std::string_view document);
std::string serialize_scenarios(const std::vector<ScenarioSpec>& specs);

}  // namespace llmsim
