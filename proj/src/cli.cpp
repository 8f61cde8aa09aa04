// SPDX-License-Identifier: Apache-2.0

#include "llmsim/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "codec.hpp"
#include "llmsim/error.hpp"
#include "llmsim/graph.hpp"
#include "llmsim/report.hpp"
#include "llmsim/scenario.hpp"
#include "number_format.hpp"
#include "overrides.hpp"

namespace llmsim {

using detail::Json;

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir.string() + "'");
  }
}

// Flags shared by run and sweep that describe one scenario.
struct ScenarioFlags {
  std::string scenario_file;
  std::string label;
  std::string model;
  std::string profile;
  std::optional<int> weight_bits;
  std::optional<int> kv_bits;
  std::optional<int> act_bits;
  std::optional<std::int64_t> batch;
  std::optional<std::int64_t> n_input;
  std::optional<std::int64_t> n_output;
  std::optional<std::int64_t> engines;
  std::optional<double> engine_scale;
  std::optional<double> orchestration_ms;
  std::optional<double> capex;
  std::optional<double> usd_per_kwh;
};

// Modeling switches accepted by run, sweep and reproduce.
struct OptionFlags {
  std::string overlap;
  bool activation_traffic = false;
  std::string transfers;
  std::string orchestration;
};

struct GlobalFlags {
  std::vector<std::string> profile_files;
  std::vector<std::string> model_files;
  std::vector<std::string> overrides;
  std::string format = "csv";
  std::string output;
  bool assumptions = false;
};

void add_scenario_flags(CLI::App* cmd, ScenarioFlags& f) {
  cmd->add_option("--scenario", f.scenario_file, "Scenario document (JSON)");
  cmd->add_option("--label", f.label, "Scenario label");
  cmd->add_option("--model", f.model, "Model name");
  cmd->add_option("--profile", f.profile, "Hardware profile name");
  cmd->add_option("--weights-bits", f.weight_bits, "Weight bits (4, 8, 16, 32)");
  cmd->add_option("--kv-bits", f.kv_bits, "KV-cache bits");
  cmd->add_option("--act-bits", f.act_bits, "Activation bits");
  cmd->add_option("--batch", f.batch, "Queries per engine");
  cmd->add_option("--in", f.n_input, "Prompt tokens");
  cmd->add_option("--out", f.n_output, "Generated tokens");
  cmd->add_option("--engines", f.engines, "Parallel inference engines");
  cmd->add_option("--engine-scale", f.engine_scale, "Fraction of the profile per engine");
  cmd->add_option("--orchestration-ms", f.orchestration_ms, "Host overhead per query (ms)");
  cmd->add_option("--capex", f.capex, "Capital cost (USD) for TCO");
  cmd->add_option("--usd-per-kwh", f.usd_per_kwh, "Electricity price for TCO");
}

void add_option_flags(CLI::App* cmd, OptionFlags& f) {
  cmd->add_option("--overlap", f.overlap, "serialized | roofline_max")
      ->check(CLI::IsMember({"serialized", "roofline_max"}));
  cmd->add_flag("--activation-traffic", f.activation_traffic,
                "Charge intermediate tensors to main memory");
  cmd->add_option("--transfers", f.transfers, "per_step | per_query")
      ->check(CLI::IsMember({"per_step", "per_query"}));
  cmd->add_option("--orchestration-mode", f.orchestration, "per_query | per_step")
      ->check(CLI::IsMember({"per_query", "per_step"}));
}

Json default_scenario() {
  Json s = Json::object();
  s["scenario"] = "run";
  s["format"] = {{"weight_bits", 16}, {"kv_bits", 16}, {"activation_bits", 16}};
  s["workload"] = {{"batch", 1}, {"n_input", 1000}, {"n_output", 100}};
  s["deployment"] = Json::object();
  return s;
}

void apply_scenario_flags(Json& s, const ScenarioFlags& f) {
  if (!f.label.empty()) s["scenario"] = f.label;
  if (!f.model.empty()) s["model"] = f.model;
  Json& dep = s["deployment"];
  if (!f.profile.empty()) {
    dep.erase("mapping");
    dep["profile"] = f.profile;
  }
  if (f.weight_bits) s["format"]["weight_bits"] = *f.weight_bits;
  if (f.kv_bits) s["format"]["kv_bits"] = *f.kv_bits;
  if (f.act_bits) s["format"]["activation_bits"] = *f.act_bits;
  if (f.batch) s["workload"]["batch"] = *f.batch;
  if (f.n_input) s["workload"]["n_input"] = *f.n_input;
  if (f.n_output) s["workload"]["n_output"] = *f.n_output;
  if (f.engines) dep["n_engines"] = *f.engines;
  if (f.engine_scale) dep["engine_scale"] = *f.engine_scale;
  if (f.orchestration_ms) dep["orchestration_s"] = *f.orchestration_ms / 1000.0;
  if (f.capex || f.usd_per_kwh) {
    Json& c = s["cost_params"];
    if (!c.is_object()) c = Json::object();
    if (f.capex) c["capex_usd"] = *f.capex;
    if (f.usd_per_kwh) c["usd_per_kwh"] = *f.usd_per_kwh;
    if (!c.contains("capex_usd")) c["capex_usd"] = 0.0;
    if (!c.contains("usd_per_kwh")) c["usd_per_kwh"] = 0.0;
  }
}

void apply_option_flags(Json& doc, const OptionFlags& f) {
  for (auto& s : doc["scenarios"]) {
    Json& o = s["options"];
    if (!o.is_object()) o = Json::object();
    if (!f.overlap.empty()) o["overlap"] = f.overlap;
    if (f.activation_traffic) o["activation_traffic"] = true;
    if (!f.transfers.empty()) o["transfers"] = f.transfers;
    if (!f.orchestration.empty()) o["orchestration"] = f.orchestration;
  }
}

// Builtins, then --profiles/--models files.
Json layered_base(const GlobalFlags& g) {
  Json doc = detail::base_document();
  for (const auto& path : g.profile_files) {
    Json layer = detail::parse_strict(read_file(path), path);
    detail::check_keys(layer, {"profiles"}, "");
    detail::merge_document(doc, layer);
  }
  for (const auto& path : g.model_files) {
    Json layer = detail::parse_strict(read_file(path), path);
    detail::check_keys(layer, {"models"}, "");
    detail::merge_document(doc, layer);
  }
  return doc;
}

void apply_overrides(Json& doc, const GlobalFlags& g) {
  for (const auto& o : g.overrides) detail::apply_override(doc, o);
}

// Effective document for run/sweep: builtins < files < flags < --set.
Json scenario_document(const GlobalFlags& g, const ScenarioFlags& f, const OptionFlags& o) {
  Json doc = layered_base(g);
  Json scenario = default_scenario();
  if (!f.scenario_file.empty()) {
    Json layer = detail::parse_strict(read_file(f.scenario_file), f.scenario_file);
    detail::merge_document(doc, layer);
    if (doc["scenarios"].empty()) {
      throw ConfigError("'" + f.scenario_file + "': no scenarios");
    }
    scenario.merge_patch(doc["scenarios"][0]);
  }
  apply_scenario_flags(scenario, f);
  if (!scenario.contains("model")) {
    throw ConfigError("run: a model is required (--model or --scenario)");
  }
  const Json& dep = scenario["deployment"];
  if (!dep.contains("profile") && !dep.contains("mapping")) {
    throw ConfigError("run: a profile is required (--profile or --scenario)");
  }
  doc["scenarios"] = Json::array({scenario});
  apply_option_flags(doc, o);
  apply_overrides(doc, g);
  return doc;
}

RecordFormat record_format(const std::string& text) {
  auto f = parse_record_format(text);
  if (!f) throw ConfigError("unknown format '" + text + "' (csv or json)");
  return *f;
}

void emit(const GlobalFlags& g, std::string_view content, std::ostream& out) {
  if (g.output.empty()) {
    out << content;
  } else {
    write_file(g.output, content);
  }
}

std::string describe_options(const RunOptions& o) {
  std::ostringstream s;
  s << "overlap=" << (o.cost.overlap == OverlapMode::kSerialized ? "serialized" : "roofline_max")
    << " activation_traffic=" << (o.cost.charge_activation_traffic ? "on" : "off")
    << " transfers=" << (o.transfers == TransferMode::kPerStep ? "per_step" : "per_query")
    << " orchestration="
    << (o.orchestration == OrchestrationMode::kPerQuery ? "per_query" : "per_step");
  return s.str();
}

std::string scenario_assumptions(const ScenarioDocument& doc) {
  std::ostringstream s;
  for (const auto& spec : doc.scenarios) {
    s << "scenario '" << spec.scenario << "' on '" << spec.deployment.label
      << "': " << describe_options(spec.options)
      << " engine_scale=" << detail::format_number(spec.deployment.engine_scale)
      << " n_engines=" << spec.deployment.n_engines
      << " orchestration_s=" << detail::format_number(spec.deployment.orchestration_s) << '\n';
  }
  for (const auto& p : doc.profiles.profiles()) {
    s << "profile '" << p.name << "' aux:";
    const AuxCost def = default_aux_cost(p);
    for (AuxKind k : kAllAuxKinds) {
      const AuxCost& c = p.aux_cost(k);
      s << ' ' << to_string(k) << '=' << detail::format_number(c.elements_per_s) << "/s@"
        << detail::format_number(c.pj_per_element) << "pJ"
        << (c == def ? "(default)" : "(override)");
    }
    s << '\n';
  }
  return s.str();
}

void print_assumptions(std::ostream& os, const ScenarioDocument* doc) {
  os << assumptions_text();
  if (doc) os << scenario_assumptions(*doc);
}

int cmd_list_profiles(const GlobalFlags& g, bool as_json, std::ostream& out) {
  Json doc = layered_base(g);
  apply_overrides(doc, g);
  ScenarioDocument resolved = detail::scenario_document_from_json(doc);
  if (as_json) {
    emit(g, serialize_profiles(resolved.profiles), out);
    return kExitOk;
  }
  std::string text;
  for (const auto& p : resolved.profiles.profiles()) text += p.name + "\n";
  emit(g, text, out);
  return kExitOk;
}

int cmd_list_models(const GlobalFlags& g, bool as_json, std::ostream& out) {
  Json doc = layered_base(g);
  apply_overrides(doc, g);
  ScenarioDocument resolved = detail::scenario_document_from_json(doc);
  if (as_json) {
    emit(g, serialize_models(resolved.models), out);
    return kExitOk;
  }
  std::string text;
  for (const auto& m : resolved.models) {
    text += m.name + "\n";
  }
  emit(g, text, out);
  return kExitOk;
}

int cmd_run(const GlobalFlags& g, const ScenarioFlags& f, const OptionFlags& o,
            const std::string& trace_path, std::ostream& out, std::ostream& err) {
  ScenarioDocument doc = detail::scenario_document_from_json(scenario_document(g, f, o));
  if (g.assumptions) print_assumptions(err, &doc);
  const ScenarioSpec& spec = doc.scenarios.front();
  std::vector<RunRecord> records = {run_scenario(spec, doc.models, doc.profiles)};
  if (!trace_path.empty()) {
    const ModelConfig& m = find_model(doc.models, spec.model);
    std::string trace = dump_trace(build_prefill_graph(m, spec.format, spec.workload.batch,
                                                       spec.workload.n_input));
    std::string decode = dump_trace(
        build_decode_graph(m, spec.format, spec.workload.batch, spec.workload.n_input));
    trace += decode.substr(decode.find('\n') + 1);
    write_file(trace_path, trace);
  }
  emit(g, emit_records(records, record_format(g.format)), out);
  return kExitOk;
}

std::string sweep_path(const std::string& param, const Json& scenario) {
  if (param.find('.') != std::string::npos) return param;
  auto profile = [&]() -> std::string {
    const Json& dep = scenario["deployment"];
    if (dep.contains("profile")) return dep["profile"].get<std::string>();
    return dep["mapping"]["default_profile"].get<std::string>();
  };
  if (param == "batch" || param == "n_input" || param == "n_output") {
    return "scenario.workload." + param;
  }
  if (param == "weight_bits" || param == "kv_bits" || param == "activation_bits") {
    return "scenario.format." + param;
  }
  if (param == "n_engines" || param == "engine_scale" || param == "orchestration_s") {
    return "scenario.deployment." + param;
  }
  if (param == "mem_bw") return "profiles." + profile() + ".main_memory.bw_gbps";
  if (param == "compute_tops") return "profiles." + profile() + ".compute.tops";
  throw ConfigError("sweep: unknown parameter '" + param + "'");
}

int cmd_sweep(const GlobalFlags& g, const ScenarioFlags& f, const OptionFlags& o,
              const std::string& param, const std::vector<std::string>& values,
              std::ostream& out, std::ostream& err) {
  if (values.empty()) throw ConfigError("sweep: --values must list at least one value");
  const Json base = scenario_document(g, f, o);
  const std::string path = sweep_path(param, base["scenarios"][0]);

  std::vector<ScenarioDocument> points;
  for (const auto& v : values) {
    Json doc = base;
    detail::apply_override(doc, path + "=" + v);
    Json& s = doc["scenarios"][0];
    s["scenario"] = s["scenario"].get<std::string>() + "[" + param + "=" + v + "]";
    points.push_back(detail::scenario_document_from_json(doc));
  }
  if (g.assumptions) print_assumptions(err, &points.front());

  std::vector<std::future<RunRecord>> pending;
  for (const auto& p : points) {
    pending.push_back(std::async(std::launch::async, [&p] {
      return run_scenario(p.scenarios.front(), p.models, p.profiles);
    }));
  }
  std::vector<RunRecord> records;
  for (auto& f : pending) records.push_back(f.get());
  emit(g, emit_records(records, record_format(g.format)), out);
  return kExitOk;
}

ComparisonReport suite_report(Suite suite, const std::vector<RunRecord>& runs) {
  if (suite == Suite::kCloud) return compare(runs, kDgxLabel);
  ComparisonReport report;
  std::vector<std::string> baselines;
  for (const auto& r : runs) {
    if (r.deployment == kPimMobileLabel) continue;
    if (std::find(baselines.begin(), baselines.end(), r.deployment) == baselines.end()) {
      baselines.push_back(r.deployment);
    }
  }
  for (const auto& b : baselines) {
    std::vector<RunRecord> pair;
    for (const auto& r : runs) {
      if (r.deployment == b || r.deployment == kPimMobileLabel) pair.push_back(r);
    }
    append(report, compare(pair, b));
  }
  return report;
}

std::string summary(const ComparisonReport& report) {
  std::ostringstream s;
  for (const auto& r : report.rows) {
    s << r.scenario << " | " << r.candidate << " vs " << r.baseline << " | " << r.metric
      << " gain " << detail::format_number(r.gain()) << '\n';
  }
  return s.str();
}

int cmd_reproduce(const GlobalFlags& g, const OptionFlags& o, const std::string& suite_name,
                  const std::string& out_dir, std::ostream& out, std::ostream& err) {
  auto suite = parse_suite(suite_name);
  if (!suite) throw LookupError("unknown suite '" + suite_name + "' (cloud or mobile)");
  Json doc = layered_base(g);
  doc["scenarios"] = detail::parse_strict(serialize_scenarios(builtin_scenarios(*suite)),
                                          "builtin scenarios")["scenarios"];
  apply_option_flags(doc, o);
  apply_overrides(doc, g);
  ScenarioDocument resolved = detail::scenario_document_from_json(doc);
  if (g.assumptions) print_assumptions(err, &resolved);

  std::vector<RunRecord> runs = run_scenarios(resolved.scenarios, resolved.models,
                                              resolved.profiles);
  ComparisonReport report = suite_report(*suite, runs);

  const fs::path dir(out_dir);
  make_dirs(dir);
  make_dirs(dir / "charts");
  write_file(dir / "scenarios.json", serialize_scenarios(resolved.scenarios));
  write_file(dir / "runs.csv", emit_records(runs, RecordFormat::kCsv));
  write_file(dir / "runs.json", emit_records(runs, RecordFormat::kJson));
  write_file(dir / "comparison.csv", emit_comparison(report, RecordFormat::kCsv));
  write_file(dir / "comparison.json", emit_comparison(report, RecordFormat::kJson));
  std::ostringstream assumptions;
  print_assumptions(assumptions, &resolved);
  write_file(dir / "assumptions.txt", assumptions.str());
  for (const auto& chart : emit_charts(report)) write_file(dir / "charts" / chart.name, chart.svg);
  out << summary(report);
  return kExitOk;
}

int cmd_compare(const GlobalFlags& g, const std::string& records_path,
                const std::string& baseline, std::ostream& out) {
  const std::string text = read_file(records_path);
  const RecordFormat in = records_path.size() >= 4 &&
                                  records_path.compare(records_path.size() - 4, 4, ".csv") == 0
                              ? RecordFormat::kCsv
                              : RecordFormat::kJson;
  std::vector<RunRecord> runs = parse_records(text, in);
  emit(g, emit_comparison(compare(runs, baseline), record_format(g.format)), out);
  return kExitOk;
}

}  // namespace

std::string assumptions_text() {
  return "units: 1 TOPS = 1e12 ops/s, 1 GB/s = 1e9 bytes/s, energies in pJ\n"
         "overlap: serialized (node time = compute + memory + aux; no hiding)\n"
         "activation_traffic: off (intermediate tensors stay on chip)\n"
         "transfers: per_step (H2D at graph start, D2H at graph end, every pass)\n"
         "h2d_payload: batch * new_tokens * d_model * activation_bits/8\n"
         "d2h_payload: batch * d_model * activation_bits/8\n"
         "profile_change: D2H on the source link + H2D on the target link via HOST\n"
         "orchestration: per_query (added to TTFT)\n"
         "aux_default: elements/s = compute_tops*1e12/8, pJ/element = compute pJ/op\n"
         "weights: streamed once per pass, shared across the batch\n"
         "moe: experts streamed per pass = min(n_experts, batch*new_tokens*top_k)\n"
         "norm_vectors: stored at activation_bits\n"
         "compute: one TOPS figure for every data format\n"
         "engine_scale: one engine owns that fraction of the profile's rates\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical LLM inference latency/energy/TCO simulator", "llmsim"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--profiles", g.profile_files, "Profile document(s) merged over builtins");
  app.add_option("--models", g.model_files, "Model document(s) merged over builtins");
  app.add_option("--set", g.overrides, "Override a dotted path: key=value")
      ->allow_extra_args(false);
  app.add_option("--format", g.format, "Output format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--output", g.output, "Output file (default stdout)");
  app.add_flag("--assumptions", g.assumptions, "Print the modeling defaults in effect");

  bool list_json = false;
  auto* list_profiles = app.add_subcommand("list-profiles", "List hardware profiles");
  list_profiles->add_flag("--json", list_json, "Print the full profile document");
  auto* list_models = app.add_subcommand("list-models", "List model presets");
  list_models->add_flag("--json", list_json, "Print the full model document");

  ScenarioFlags run_flags;
  OptionFlags run_opts;
  std::string trace_path;
  auto* run = app.add_subcommand("run", "Simulate one scenario");
  add_scenario_flags(run, run_flags);
  add_option_flags(run, run_opts);
  run->add_option("--trace", trace_path, "Write the prefill and first decode graph as CSV");

  std::string records_path;
  std::string baseline;
  auto* cmp = app.add_subcommand("compare", "Ratio table from emitted run records");
  cmp->add_option("--records", records_path, "Records file (.json or .csv)")->required();
  cmp->add_option("--baseline", baseline, "Baseline deployment label")->required();

  ScenarioFlags sweep_flags;
  OptionFlags sweep_opts;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "Vary one parameter over a list");
  add_scenario_flags(sweep, sweep_flags);
  add_option_flags(sweep, sweep_opts);
  sweep->add_option("--param", sweep_param,
                    "batch, n_input, n_output, weight_bits, kv_bits, activation_bits, "
                    "n_engines, engine_scale, orchestration_s, mem_bw, compute_tops, "
                    "or a dotted path")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  std::string suite;
  std::string out_dir;
  OptionFlags repro_opts;
  auto* repro = app.add_subcommand("reproduce", "Run a builtin comparison suite");
  repro->add_option("suite", suite, "cloud | mobile")->required();
  repro->add_option("--out", out_dir, "Output directory")->required();
  add_option_flags(repro, repro_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "llmsim: error[usage]: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*list_profiles) return cmd_list_profiles(g, list_json, out);
    if (*list_models) return cmd_list_models(g, list_json, out);
    if (*run) return cmd_run(g, run_flags, run_opts, trace_path, out, err);
    if (*cmp) return cmd_compare(g, records_path, baseline, out);
    if (*sweep) return cmd_sweep(g, sweep_flags, sweep_opts, sweep_param, sweep_values, out, err);
    if (*repro) return cmd_reproduce(g, repro_opts, suite, out_dir, out, err);
    if (g.assumptions) {
      out << assumptions_text();
      return kExitOk;
    }
    out << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    err << "llmsim: error[" << category_name(e.category()) << "]: " << msg << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    err << "llmsim: error[internal]: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace llmsim
