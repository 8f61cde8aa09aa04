// SPDX-License-Identifier: Apache-2.0

#include "llmsim/scenario.hpp"

#include <cmath>
#include <future>
#include <thread>

#include "llmsim/error.hpp"
#include "llmsim/graph.hpp"

namespace llmsim {

namespace {

constexpr double kPjToJ = 1e-12;

// Registry whose mapped profiles carry one engine's share of the rates.
ProfileRegistry engine_registry(const ProfileRegistry& reg, const DeploymentSpec& d) {
  if (d.engine_scale == 1.0) return reg;
  ProfileRegistry out;
  for (const auto& p : reg.profiles()) {
    out.add(scale_profile(p, d.engine_scale, p.name));
  }
  return out;
}

void fold(InferenceMetrics& m, const PhaseCost& c) {
  m.compute_j += c.compute_pj * kPjToJ;
  m.mem_j += c.mem_pj * kPjToJ;
  m.aux_j += c.aux_pj * kPjToJ;
  m.transfer_j += c.transfer_pj * kPjToJ;
  m.weight_bytes += c.traffic.weight_bytes;
  m.kv_read_bytes += c.traffic.kv_read;
  m.kv_write_bytes += c.traffic.kv_write;
  m.h2d_bytes += c.h2d_bytes;
  m.d2h_bytes += c.d2h_bytes;
  m.flops += c.traffic.flops;
}

}  // namespace

void validate(const Workload& w) {
  if (w.batch < 1) throw ValidationError("workload: batch must be >= 1");
  if (w.n_input < 1) throw ValidationError("workload: n_input must be >= 1");
  if (w.n_output < 1) throw ValidationError("workload: n_output must be >= 1");
}

void validate(const DeploymentSpec& d) {
  if (d.n_engines < 1) throw ValidationError("deployment '" + d.label + "': n_engines must be >= 1");
  if (!(d.orchestration_s >= 0.0) || !std::isfinite(d.orchestration_s)) {
    throw ValidationError("deployment '" + d.label + "': orchestration_s must be >= 0");
  }
  if (!(d.engine_scale > 0.0) || !std::isfinite(d.engine_scale)) {
    throw ValidationError("deployment '" + d.label + "': engine_scale must be > 0");
  }
}

InferenceMetrics run_inference(const ModelConfig& m, const DataFormatPolicy& fmt,
                               const Workload& w, const DeploymentSpec& d,
                               const ProfileRegistry& reg, const RunOptions& options) {
  validate(m);
  validate(fmt);
  validate(w);
  validate(d);
  const ProfileRegistry engine = engine_registry(reg, d);
  const bool per_step = options.transfers == TransferMode::kPerStep;

  InferenceMetrics out;

  GraphEvalOptions prefill_opts;
  prefill_opts.cost = options.cost;
  prefill_opts.activation_bits = fmt.activation_bits;
  const PhaseCost prefill =
      eval_graph(build_prefill_graph(m, fmt, w.batch, w.n_input), d.mapping, engine,
                 prefill_opts);
  fold(out, prefill);
  out.prefill_s = prefill.total_s;
  out.prefill_j = prefill.total_pj * kPjToJ;
  out.encode_energy_j = out.prefill_j / static_cast<double>(w.batch);
  out.orchestration_s = d.orchestration_s;
  out.ttft_s = d.orchestration_s + prefill.total_s;

  out.decode_steps = w.n_output - 1;
  for (std::int64_t t = 1; t < w.n_output; ++t) {
    GraphEvalOptions step_opts;
    step_opts.cost = options.cost;
    step_opts.activation_bits = fmt.activation_bits;
    step_opts.transfer_at_start = per_step;
    step_opts.transfer_at_end = per_step;
    if (!per_step && t == w.n_output - 1) {
      step_opts.extra_d2h_bytes = static_cast<double>(w.batch) *
                                  static_cast<double>(w.n_output - 1) *
                                  static_cast<double>(m.d_model) *
                                  fmt.activation_bits / 8.0;
    }
    // Free the per-node records; only the fold is kept.
    PhaseCost step = eval_graph(build_decode_graph(m, fmt, w.batch, w.n_input + t - 1),
                                d.mapping, engine, step_opts);
    step.ops.clear();
    fold(out, step);
    out.decode_s += step.total_s;
    out.decode_j += step.total_pj * kPjToJ;
    if (options.orchestration == OrchestrationMode::kPerStep) {
      out.decode_s += d.orchestration_s;
      out.orchestration_s += d.orchestration_s;
    }
  }

  const double engines = static_cast<double>(d.n_engines);
  const double batch = static_cast<double>(w.batch);
  if (out.decode_steps > 0) {
    const double steps = static_cast<double>(out.decode_steps);
    out.tokens_per_s = steps * batch * engines / out.decode_s;
    out.energy_per_token_j = out.decode_j / (steps * batch);
  }
  out.query_latency_s = out.ttft_s + out.decode_s;
  const double engine_energy = out.prefill_j + out.decode_j;
  out.total_energy_j = engine_energy * engines;
  out.qps = batch * engines / out.query_latency_s;
  out.epq_j = out.total_energy_j / (batch * engines);
  out.avg_power_w = engine_energy / out.query_latency_s * engines;
  return out;
}

FitReport validate_fit(const ModelConfig& m, const DataFormatPolicy& fmt,
                       const Workload& w, double capacity_bytes) {
  FitReport r;
  r.weight_bytes = weight_bytes(m, fmt);
  r.kv_bytes_per_query = static_cast<double>(w.n_input + w.n_output) *
                         static_cast<double>(kv_bytes_per_token(m, fmt));
  r.required_bytes = r.weight_bytes + static_cast<double>(w.batch) * r.kv_bytes_per_query;
  r.capacity_bytes = capacity_bytes;
  r.fits = r.required_bytes <= capacity_bytes;
  const double spare = capacity_bytes - r.weight_bytes;
  if (spare > 0.0 && r.kv_bytes_per_query > 0.0) {
    r.max_batch = static_cast<std::int64_t>(std::floor(spare / r.kv_bytes_per_query));
  }
  return r;
}

double tco_per_qps(const InferenceMetrics& metrics, const CostParams& c) {
  if (!(metrics.qps > 0.0)) throw ValidationError("tco: qps must be > 0");
  if (c.capex_usd < 0.0 || c.usd_per_kwh < 0.0 || c.horizon_hours < 0.0) {
    throw ValidationError("tco: cost parameters must be non-negative");
  }
  const double energy_usd = metrics.avg_power_w / 1000.0 * c.horizon_hours * c.usd_per_kwh;
  return (c.capex_usd + energy_usd) / metrics.qps;
}

RunRecord run_scenario(const ScenarioSpec& spec, const std::vector<ModelConfig>& models,
                       const ProfileRegistry& reg) {
  const ModelConfig& m = find_model(models, spec.model);
  RunRecord r;
  r.scenario = spec.scenario;
  r.model = spec.model;
  r.format = spec.format;
  r.workload = spec.workload;
  r.deployment = spec.deployment.label;
  r.metrics = run_inference(m, spec.format, spec.workload, spec.deployment, reg,
                            spec.options);
  if (spec.cost_params) r.tco_per_qps_usd = tco_per_qps(r.metrics, *spec.cost_params);
  return r;
}

std::vector<RunRecord> run_scenarios(const std::vector<ScenarioSpec>& specs,
                                     const std::vector<ModelConfig>& models,
                                     const ProfileRegistry& reg, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunRecord> out(specs.size());
  for (std::size_t begin = 0; begin < specs.size(); begin += threads) {
    const std::size_t end = std::min(specs.size(), begin + threads);
    std::vector<std::future<RunRecord>> pending;
    for (std::size_t i = begin; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, [&, i] {
        return run_scenario(specs[i], models, reg);
      }));
    }
    for (std::size_t i = begin; i < end; ++i) out[i] = pending[i - begin].get();
  }
  return out;
}

std::optional<Suite> parse_suite(std::string_view text) {
  if (text == "cloud") return Suite::kCloud;
  if (text == "mobile") return Suite::kMobile;
  return std::nullopt;
}

std::string_view to_string(Suite suite) {
  return suite == Suite::kCloud ? "cloud" : "mobile";
}

std::vector<ScenarioSpec> builtin_scenarios(Suite suite) {
  std::vector<ScenarioSpec> out;
  const Workload base{1, 1000, 100};
  if (suite == Suite::kCloud) {
    struct Case {
      const char* scenario;
      const char* model;
      std::int64_t dgx_batch;
      std::int64_t pim_batch;
    };
    static constexpr Case kCases[] = {
        {"cloud/Llama2-70B/GQA8", "Llama2-70B", 200, 80},
        {"cloud/Llama2-70B/MHA", "Llama2-70B-MHA", 46, 10},
        {"cloud/Mixtral-8x22B/GQA8", "Mixtral-8x22B", 200, 80},
        {"cloud/Mixtral-8x22B/MHA", "Mixtral-8x22B-MHA", 88, 20},
    };
    constexpr double kOrchestration = 0.5e-3;
    constexpr double kUsdPerKwh = 0.153;
    for (const Case& c : kCases) {
      ScenarioSpec dgx;
      dgx.scenario = c.scenario;
      dgx.model = c.model;
      dgx.format = {16, 16, 16};
      dgx.workload = base;
      dgx.workload.batch = c.dgx_batch;
      dgx.deployment.label = std::string(kDgxLabel);
      dgx.deployment.mapping = MappingScheme::single("DGX-H100");
      dgx.deployment.orchestration_s = kOrchestration;
      dgx.cost_params = CostParams{300000.0, kUsdPerKwh};
      out.push_back(dgx);

      // 4 servers x 24 PIM DIMMs, 8 DIMMs per engine -> 12 engines, each
      // with 8/24 of a server's rates.
      ScenarioSpec pim = dgx;
      pim.workload.batch = c.pim_batch;
      pim.deployment.label = std::string(kPimCloudLabel);
      pim.deployment.mapping = MappingScheme::single("PIM-AI server");
      pim.deployment.engine_scale = 8.0 / 24.0;
      pim.deployment.n_engines = 12;
      pim.cost_params = CostParams{60000.0, kUsdPerKwh};
      out.push_back(pim);
    }
  } else {
    static constexpr const char* kModels[] = {"Llama2-7B", "Mistral-7B"};
    static constexpr const char* kDevices[] = {"PIM-AI chip", "A17 Pro",
                                               "Snapdragon 8 Gen3", "Dimensity 9300"};
    for (const char* model : kModels) {
      for (const char* device : kDevices) {
        ScenarioSpec s;
        s.scenario = std::string("mobile/") + model;
        s.model = model;
        s.format = {4, 16, 16};
        s.workload = base;
        s.deployment.label = device;
        s.deployment.mapping = MappingScheme::single(device);
        s.deployment.orchestration_s = 20e-3;
        out.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace llmsim
