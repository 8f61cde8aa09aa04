// SPDX-License-Identifier: Apache-2.0

#include "codec.hpp"
#include "llmsim/error.hpp"

namespace llmsim {

using detail::Json;

namespace detail {

namespace {

const char* overlap_name(OverlapMode m) {
  return m == OverlapMode::kSerialized ? "serialized" : "roofline_max";
}

const char* transfers_name(TransferMode m) {
  return m == TransferMode::kPerStep ? "per_step" : "per_query";
}

const char* orchestration_name(OrchestrationMode m) {
  return m == OrchestrationMode::kPerQuery ? "per_query" : "per_step";
}

[[noreturn]] void bad_enum(const std::string& path, const std::string& allowed) {
  throw ConfigError("field '" + path + "': expected one of " + allowed);
}

}  // namespace

Json mapping_to_json(const MappingScheme& m) {
  Json j = Json::object();
  j["default_profile"] = m.default_profile;
  Json rules = Json::array();
  for (const auto& r : m.rules) {
    Json match = Json::object();
    if (!r.kinds.empty()) {
      Json kinds = Json::array();
      for (OpKind k : r.kinds) kinds.push_back(std::string(to_string(k)));
      match["kinds"] = std::move(kinds);
    }
    if (r.layers) match["layers"] = {r.layers->first, r.layers->last};
    rules.push_back({{"match", std::move(match)}, {"profile", r.profile}});
  }
  j["rules"] = std::move(rules);
  Json sync = Json::array();
  for (std::size_t s : m.sync_points) sync.push_back(s);
  j["sync"] = std::move(sync);
  if (m.h2d_payload_bytes || m.d2h_payload_bytes) {
    Json payload = Json::object();
    if (m.h2d_payload_bytes) payload["h2d_bytes"] = *m.h2d_payload_bytes;
    if (m.d2h_payload_bytes) payload["d2h_bytes"] = *m.d2h_payload_bytes;
    j["payload"] = std::move(payload);
  }
  return j;
}

MappingScheme mapping_from_json(const Json& obj, const std::string& path) {
  check_keys(obj, {"default_profile", "rules", "sync", "payload"}, path);
  MappingScheme m;
  m.default_profile = get_string(obj, "default_profile", path);
  if (obj.contains("rules")) {
    const Json& rules = require_array(obj, "rules", path);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const std::string rp = path + ".rules[" + std::to_string(i) + "]";
      check_keys(rules[i], {"match", "profile"}, rp);
      MappingRule rule;
      rule.profile = get_string(rules[i], "profile", rp);
      if (rules[i].contains("match")) {
        const Json& match = require_object(rules[i], "match", rp);
        check_keys(match, {"kinds", "layers"}, rp + ".match");
        if (match.contains("kinds")) {
          for (const auto& k : require_array(match, "kinds", rp + ".match")) {
            auto kind = k.is_string() ? parse_op_kind(k.get<std::string>()) : std::nullopt;
            if (!kind) throw ConfigError("field '" + rp + ".match.kinds': unknown op kind");
            rule.kinds.push_back(*kind);
          }
        }
        if (match.contains("layers")) {
          const Json& layers = require_array(match, "layers", rp + ".match");
          if (layers.size() != 2 || !layers[0].is_number_integer() ||
              !layers[1].is_number_integer()) {
            throw ConfigError("field '" + rp + ".match.layers': expected [first, last]");
          }
          rule.layers = LayerRange{layers[0].get<int>(), layers[1].get<int>()};
        }
      }
      m.rules.push_back(std::move(rule));
    }
  }
  if (obj.contains("sync")) {
    for (const auto& s : require_array(obj, "sync", path)) {
      if (!s.is_number_unsigned()) {
        throw ConfigError("field '" + path + ".sync': expected non-negative integers");
      }
      m.sync_points.push_back(s.get<std::size_t>());
    }
  }
  if (obj.contains("payload")) {
    const Json& payload = require_object(obj, "payload", path);
    check_keys(payload, {"h2d_bytes", "d2h_bytes"}, path + ".payload");
    m.h2d_payload_bytes = opt_number(payload, "h2d_bytes", path + ".payload");
    m.d2h_payload_bytes = opt_number(payload, "d2h_bytes", path + ".payload");
  }
  return m;
}

Json scenario_to_json(const ScenarioSpec& s) {
  Json j = Json::object();
  j["scenario"] = s.scenario;
  j["model"] = s.model;
  j["format"] = format_to_json(s.format);
  j["workload"] = {{"batch", s.workload.batch},
                   {"n_input", s.workload.n_input},
                   {"n_output", s.workload.n_output}};
  Json dep = Json::object();
  dep["label"] = s.deployment.label;
  dep["mapping"] = mapping_to_json(s.deployment.mapping);
  dep["engine_scale"] = s.deployment.engine_scale;
  dep["n_engines"] = s.deployment.n_engines;
  dep["orchestration_s"] = s.deployment.orchestration_s;
  j["deployment"] = std::move(dep);
  if (s.cost_params) {
    j["cost_params"] = {{"capex_usd", s.cost_params->capex_usd},
                        {"usd_per_kwh", s.cost_params->usd_per_kwh},
                        {"horizon_hours", s.cost_params->horizon_hours}};
  }
  j["options"] = {
      {"overlap", overlap_name(s.options.cost.overlap)},
      {"activation_traffic", s.options.cost.charge_activation_traffic},
      {"transfers", transfers_name(s.options.transfers)},
      {"orchestration", orchestration_name(s.options.orchestration)},
  };
  return j;
}

ScenarioSpec scenario_from_json(const Json& obj, const std::string& path) {
  check_keys(obj,
             {"scenario", "model", "format", "workload", "deployment", "cost_params",
              "options"},
             path);
  ScenarioSpec s;
  s.scenario = get_string(obj, "scenario", path);
  const std::string base = "scenarios." + s.scenario;
  s.model = get_string(obj, "model", base);
  if (obj.contains("format")) {
    s.format = format_from_json(require_object(obj, "format", base), base + ".format");
  }
  const Json& w = require_object(obj, "workload", base);
  check_keys(w, {"batch", "n_input", "n_output"}, base + ".workload");
  s.workload.batch = get_int(w, "batch", base + ".workload");
  s.workload.n_input = get_int(w, "n_input", base + ".workload");
  s.workload.n_output = get_int(w, "n_output", base + ".workload");
  validate(s.workload);

  const std::string dp = base + ".deployment";
  const Json& d = require_object(obj, "deployment", base);
  check_keys(d, {"label", "mapping", "profile", "engine_scale", "n_engines",
                 "orchestration_s"},
             dp);
  if (d.contains("mapping") == d.contains("profile")) {
    throw ConfigError("field '" + dp + "': exactly one of 'profile' or 'mapping' required");
  }
  if (d.contains("profile")) {
    s.deployment.mapping = MappingScheme::single(get_string(d, "profile", dp));
  } else {
    s.deployment.mapping = mapping_from_json(require_object(d, "mapping", dp), dp + ".mapping");
  }
  s.deployment.label =
      opt_string(d, "label", dp).value_or(s.deployment.mapping.default_profile);
  s.deployment.engine_scale = opt_number(d, "engine_scale", dp).value_or(1.0);
  s.deployment.n_engines = opt_int(d, "n_engines", dp).value_or(1);
  s.deployment.orchestration_s = opt_number(d, "orchestration_s", dp).value_or(0.0);
  validate(s.deployment);

  if (obj.contains("cost_params")) {
    const std::string cp = base + ".cost_params";
    const Json& c = require_object(obj, "cost_params", base);
    check_keys(c, {"capex_usd", "usd_per_kwh", "horizon_hours"}, cp);
    CostParams params;
    params.capex_usd = get_number(c, "capex_usd", cp);
    params.usd_per_kwh = get_number(c, "usd_per_kwh", cp);
    params.horizon_hours = opt_number(c, "horizon_hours", cp).value_or(params.horizon_hours);
    if (params.capex_usd < 0 || params.usd_per_kwh < 0 || params.horizon_hours < 0) {
      throw ValidationError("field '" + cp + "': values must be non-negative");
    }
    s.cost_params = params;
  }
  if (obj.contains("options")) {
    const std::string op = base + ".options";
    const Json& o = require_object(obj, "options", base);
    check_keys(o, {"overlap", "activation_traffic", "transfers", "orchestration"}, op);
    if (auto v = opt_string(o, "overlap", op)) {
      if (*v == "serialized") {
        s.options.cost.overlap = OverlapMode::kSerialized;
      } else if (*v == "roofline_max") {
        s.options.cost.overlap = OverlapMode::kRooflineMax;
      } else {
        bad_enum(op + ".overlap", "serialized, roofline_max");
      }
    }
    s.options.cost.charge_activation_traffic =
        opt_bool(o, "activation_traffic", op).value_or(false);
    if (auto v = opt_string(o, "transfers", op)) {
      if (*v == "per_step") {
        s.options.transfers = TransferMode::kPerStep;
      } else if (*v == "per_query") {
        s.options.transfers = TransferMode::kPerQuery;
      } else {
        bad_enum(op + ".transfers", "per_step, per_query");
      }
    }
    if (auto v = opt_string(o, "orchestration", op)) {
      if (*v == "per_query") {
        s.options.orchestration = OrchestrationMode::kPerQuery;
      } else if (*v == "per_step") {
        s.options.orchestration = OrchestrationMode::kPerStep;
      } else {
        bad_enum(op + ".orchestration", "per_query, per_step");
      }
    }
  }
  return s;
}

ScenarioDocument scenario_document_from_json(const Json& doc) {
  check_keys(doc, {"profiles", "models", "scenarios"}, "");
  ScenarioDocument out;
  out.profiles = builtin_profiles();
  out.models = builtin_models();
  if (doc.contains("profiles")) {
    Json sub = Json::object();
    sub["profiles"] = require_array(doc, "profiles", "");
    out.profiles = load_profiles(sub.dump(), /*merge_builtins=*/true);
  }
  if (doc.contains("models")) {
    Json sub = Json::object();
    sub["models"] = require_array(doc, "models", "");
    for (auto& m : load_models(sub.dump())) {
      bool replaced = false;
      for (auto& existing : out.models) {
        if (existing.name == m.name) {
          existing = m;
          replaced = true;
        }
      }
      if (!replaced) out.models.push_back(std::move(m));
    }
  }
  if (doc.contains("scenarios")) {
    const Json& list = require_array(doc, "scenarios", "");
    for (std::size_t i = 0; i < list.size(); ++i) {
      out.scenarios.push_back(
          scenario_from_json(list[i], "scenarios[" + std::to_string(i) + "]"));
    }
  }
  for (const auto& s : out.scenarios) {
    find_model(out.models, s.model);
    out.profiles.lookup(s.deployment.mapping.default_profile);
    for (const auto& rule : s.deployment.mapping.rules) out.profiles.lookup(rule.profile);
  }
  return out;
}

}  // namespace detail

ScenarioDocument load_scenario_document(std::string_view document) {
  return detail::scenario_document_from_json(
      detail::parse_strict(document, "scenario document"));
}

std::string serialize_scenarios(const std::vector<ScenarioSpec>& specs) {
  Json list = Json::array();
  for (const auto& s : specs) list.push_back(detail::scenario_to_json(s));
  Json doc = Json::object();
  doc["scenarios"] = std::move(list);
  return doc.dump(2) + "\n";
}

}  // namespace llmsim
