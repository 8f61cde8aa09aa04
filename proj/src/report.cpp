// SPDX-License-Identifier: Apache-2.0

#include "llmsim/report.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "codec.hpp"
#include "llmsim/error.hpp"
#include "number_format.hpp"

namespace llmsim {

using detail::format_number;
using detail::Json;

namespace {

constexpr std::array<MetricInfo, 8> kMetrics = {{
    {MetricId::kTtft, "ttft_s", false},
    {MetricId::kEncodeEnergy, "encode_energy_j", false},
    {MetricId::kTokensPerS, "tokens_per_s", true},
    {MetricId::kEnergyPerToken, "energy_per_token_j", false},
    {MetricId::kQps, "qps", true},
    {MetricId::kEpq, "epq_j", false},
    {MetricId::kAvgPower, "avg_power_w", false},
    {MetricId::kTcoPerQps, "tco_per_qps_usd", false},
}};

constexpr std::array<std::string_view, 14> kCsvColumns = {
    "scenario", "model",     "format_bits",        "batch", "n_input",
    "n_output", "deployment", "ttft_s",            "tokens_per_s",
    "energy_per_token_j",    "qps",                "epq_j", "avg_power_w",
    "tco_per_qps_usd"};

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return out;
}

std::string format_bits(const DataFormatPolicy& f) {
  return "w" + std::to_string(f.weight_bits) + "/kv" + std::to_string(f.kv_bits) + "/a" +
         std::to_string(f.activation_bits);
}

DataFormatPolicy parse_format_bits(const std::string& text) {
  DataFormatPolicy f;
  int w = 0, kv = 0, a = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "w%d/kv%d/a%d%c", &w, &kv, &a, &tail) != 3) {
    throw ConfigError("records: malformed format_bits '" + text + "'");
  }
  f.weight_bits = w;
  f.kv_bits = kv;
  f.activation_bits = a;
  validate(f);
  return f;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string opt_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw ConfigError("records: unterminated quoted CSV field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double csv_number(const std::string& text, std::string_view column) {
  auto v = detail::parse_number(text);
  if (!v) throw ConfigError("records: column '" + std::string(column) + "': bad number '" + text + "'");
  return *v;
}

std::optional<double> csv_opt_number(const std::string& text, std::string_view column) {
  if (text.empty()) return std::nullopt;
  return csv_number(text, column);
}

std::int64_t csv_int(const std::string& text, std::string_view column) {
  double v = csv_number(text, column);
  auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("records: column '" + std::string(column) + "': expected integer");
  }
  return i;
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json record_to_json(const RunRecord& r) {
  const InferenceMetrics& m = r.metrics;
  Json metrics = Json::object();
  metrics["ttft_s"] = m.ttft_s;
  metrics["prefill_s"] = m.prefill_s;
  metrics["prefill_j"] = m.prefill_j;
  metrics["encode_energy_j"] = m.encode_energy_j;
  metrics["decode_s"] = m.decode_s;
  metrics["decode_j"] = m.decode_j;
  metrics["decode_steps"] = m.decode_steps;
  metrics["tokens_per_s"] = opt_json(m.tokens_per_s);
  metrics["energy_per_token_j"] = opt_json(m.energy_per_token_j);
  metrics["orchestration_s"] = m.orchestration_s;
  metrics["query_latency_s"] = m.query_latency_s;
  metrics["qps"] = m.qps;
  metrics["epq_j"] = m.epq_j;
  metrics["avg_power_w"] = m.avg_power_w;
  metrics["total_energy_j"] = m.total_energy_j;
  metrics["compute_j"] = m.compute_j;
  metrics["mem_j"] = m.mem_j;
  metrics["aux_j"] = m.aux_j;
  metrics["transfer_j"] = m.transfer_j;
  metrics["weight_bytes"] = m.weight_bytes;
  metrics["kv_read_bytes"] = m.kv_read_bytes;
  metrics["kv_write_bytes"] = m.kv_write_bytes;
  metrics["h2d_bytes"] = m.h2d_bytes;
  metrics["d2h_bytes"] = m.d2h_bytes;
  metrics["flops"] = m.flops;

  Json j = Json::object();
  j["scenario"] = r.scenario;
  j["model"] = r.model;
  j["format"] = detail::format_to_json(r.format);
  j["workload"] = {{"batch", r.workload.batch},
                   {"n_input", r.workload.n_input},
                   {"n_output", r.workload.n_output}};
  j["deployment"] = r.deployment;
  j["metrics"] = std::move(metrics);
  j["tco_per_qps_usd"] = opt_json(r.tco_per_qps_usd);
  return j;
}

std::optional<double> json_opt(const Json& obj, const char* key, const std::string& path) {
  const Json& v = detail::require(obj, key, path);
  if (v.is_null()) return std::nullopt;
  return detail::get_number(obj, key, path);
}

RunRecord record_from_json(const Json& j, const std::string& path) {
  detail::check_keys(j,
                     {"scenario", "model", "format", "workload", "deployment", "metrics",
                      "tco_per_qps_usd"},
                     path);
  RunRecord r;
  r.scenario = detail::get_string(j, "scenario", path);
  r.model = detail::get_string(j, "model", path);
  r.format = detail::format_from_json(detail::require_object(j, "format", path), path + ".format");
  const Json& w = detail::require_object(j, "workload", path);
  r.workload.batch = detail::get_int(w, "batch", path + ".workload");
  r.workload.n_input = detail::get_int(w, "n_input", path + ".workload");
  r.workload.n_output = detail::get_int(w, "n_output", path + ".workload");
  r.deployment = detail::get_string(j, "deployment", path);
  r.tco_per_qps_usd = json_opt(j, "tco_per_qps_usd", path);

  const std::string mp = path + ".metrics";
  const Json& mj = detail::require_object(j, "metrics", path);
  InferenceMetrics& m = r.metrics;
  auto num = [&](const char* key) { return detail::get_number(mj, key, mp); };
  m.ttft_s = num("ttft_s");
  m.prefill_s = num("prefill_s");
  m.prefill_j = num("prefill_j");
  m.encode_energy_j = num("encode_energy_j");
  m.decode_s = num("decode_s");
  m.decode_j = num("decode_j");
  m.decode_steps = detail::get_int(mj, "decode_steps", mp);
  m.tokens_per_s = json_opt(mj, "tokens_per_s", mp);
  m.energy_per_token_j = json_opt(mj, "energy_per_token_j", mp);
  m.orchestration_s = num("orchestration_s");
  m.query_latency_s = num("query_latency_s");
  m.qps = num("qps");
  m.epq_j = num("epq_j");
  m.avg_power_w = num("avg_power_w");
  m.total_energy_j = num("total_energy_j");
  m.compute_j = num("compute_j");
  m.mem_j = num("mem_j");
  m.aux_j = num("aux_j");
  m.transfer_j = num("transfer_j");
  m.weight_bytes = num("weight_bytes");
  m.kv_read_bytes = num("kv_read_bytes");
  m.kv_write_bytes = num("kv_write_bytes");
  m.h2d_bytes = num("h2d_bytes");
  m.d2h_bytes = num("d2h_bytes");
  m.flops = num("flops");
  return r;
}

Json meta_json() {
  return {{"tool", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
}

}  // namespace

std::span<const MetricInfo> all_metrics() { return kMetrics; }

const MetricInfo& metric_info(MetricId id) {
  for (const auto& m : kMetrics) {
    if (m.id == id) return m;
  }
  return kMetrics.front();
}

std::optional<MetricId> parse_metric(std::string_view name) {
  for (const auto& m : kMetrics) {
    if (m.name == name) return m.id;
  }
  return std::nullopt;
}

std::optional<double> metric_value(const RunRecord& r, MetricId id) {
  const InferenceMetrics& m = r.metrics;
  switch (id) {
    case MetricId::kTtft:
      return m.ttft_s;
    case MetricId::kEncodeEnergy:
      if (std::isnan(m.encode_energy_j)) return std::nullopt;
      return m.encode_energy_j;
    case MetricId::kTokensPerS:
      return m.tokens_per_s;
    case MetricId::kEnergyPerToken:
      return m.energy_per_token_j;
    case MetricId::kQps:
      return m.qps;
    case MetricId::kEpq:
      return m.epq_j;
    case MetricId::kAvgPower:
      return m.avg_power_w;
    case MetricId::kTcoPerQps:
      return r.tco_per_qps_usd;
  }
  return std::nullopt;
}

ComparisonReport compare(std::span<const RunRecord> runs, std::string_view baseline) {
  ComparisonReport report;
  report.baseline = std::string(baseline);
  report.meta.digest = hex64(fnv1a(emit_records(runs, RecordFormat::kJson)));

  // Scenarios in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> groups;
  for (const auto& r : runs) {
    auto& g = groups[r.scenario];
    if (g.empty()) order.push_back(r.scenario);
    g.push_back(&r);
  }
  for (const auto& scenario : order) {
    const auto& group = groups[scenario];
    const RunRecord* base = nullptr;
    for (const auto* r : group) {
      if (r->deployment == baseline) {
        if (base) {
          throw ValidationError("compare: scenario '" + scenario +
                                "' holds baseline '" + std::string(baseline) + "' twice");
        }
        base = r;
      }
    }
    if (!base) {
      throw LookupError("compare: scenario '" + scenario + "' has no baseline '" +
                        std::string(baseline) + "'");
    }
    for (const auto* cand : group) {
      if (cand == base) continue;
      for (const auto& info : kMetrics) {
        auto bv = metric_value(*base, info.id);
        auto cv = metric_value(*cand, info.id);
        if (bv.has_value() != cv.has_value()) {
          throw ValidationError("compare: scenario '" + scenario + "': metric '" +
                                std::string(info.name) + "' present on only one of '" +
                                base->deployment + "' and '" + cand->deployment + "'");
        }
        if (!bv) continue;
        ComparisonRow row;
        row.scenario = scenario;
        row.baseline = base->deployment;
        row.candidate = cand->deployment;
        row.metric = std::string(info.name);
        row.baseline_value = *bv;
        row.candidate_value = *cv;
        row.ratio = *cv / *bv;
        row.higher_is_better = info.higher_is_better;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

void append(ComparisonReport& into, const ComparisonReport& more) {
  if (into.rows.empty() && into.baseline.empty()) {
    into = more;
    return;
  }
  if (into.baseline != more.baseline) into.baseline = "mixed";
  into.meta.digest = hex64(fnv1a(into.meta.digest + more.meta.digest));
  into.rows.insert(into.rows.end(), more.rows.begin(), more.rows.end());
}

std::optional<RecordFormat> parse_record_format(std::string_view text) {
  if (text == "csv") return RecordFormat::kCsv;
  if (text == "json") return RecordFormat::kJson;
  return std::nullopt;
}

std::span<const std::string_view> csv_columns() { return kCsvColumns; }

std::string emit_records(std::span<const RunRecord> runs, RecordFormat format) {
  if (format == RecordFormat::kJson) {
    Json list = Json::array();
    for (const auto& r : runs) list.push_back(record_to_json(r));
    Json doc = Json::object();
    doc["meta"] = meta_json();
    doc["runs"] = std::move(list);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    out << (i ? "," : "") << kCsvColumns[i];
  }
  out << '\n';
  for (const auto& r : runs) {
    const InferenceMetrics& m = r.metrics;
    out << csv_field(r.scenario) << ',' << csv_field(r.model) << ','
        << format_bits(r.format) << ',' << r.workload.batch << ',' << r.workload.n_input
        << ',' << r.workload.n_output << ',' << csv_field(r.deployment) << ','
        << format_number(m.ttft_s) << ',' << opt_number(m.tokens_per_s) << ','
        << opt_number(m.energy_per_token_j) << ',' << format_number(m.qps) << ','
        << format_number(m.epq_j) << ',' << format_number(m.avg_power_w) << ','
        << opt_number(r.tco_per_qps_usd) << '\n';
  }
  return out.str();
}

std::vector<RunRecord> parse_records(std::string_view document, RecordFormat format) {
  std::vector<RunRecord> out;
  if (format == RecordFormat::kJson) {
    Json doc = detail::parse_strict(document, "records");
    detail::check_keys(doc, {"meta", "runs"}, "");
    const Json& runs = detail::require_array(doc, "runs", "");
    for (std::size_t i = 0; i < runs.size(); ++i) {
      out.push_back(record_from_json(runs[i], "runs[" + std::to_string(i) + "]"));
    }
    return out;
  }
  auto rows = split_csv(document);
  if (rows.empty()) throw ConfigError("records: missing CSV header");
  if (rows.front().size() != kCsvColumns.size()) {
    throw ConfigError("records: CSV header has wrong column count");
  }
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (rows.front()[i] != kCsvColumns[i]) {
      throw ConfigError("records: unexpected CSV column '" + rows.front()[i] + "'");
    }
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != kCsvColumns.size()) {
      throw ConfigError("records: CSV row " + std::to_string(i) + " has wrong column count");
    }
    RunRecord r;
    r.scenario = f[0];
    r.model = f[1];
    r.format = parse_format_bits(f[2]);
    r.workload.batch = csv_int(f[3], kCsvColumns[3]);
    r.workload.n_input = csv_int(f[4], kCsvColumns[4]);
    r.workload.n_output = csv_int(f[5], kCsvColumns[5]);
    r.deployment = f[6];
    // Not a CSV column.
    r.metrics.encode_energy_j = std::numeric_limits<double>::quiet_NaN();
    r.metrics.ttft_s = csv_number(f[7], kCsvColumns[7]);
    r.metrics.tokens_per_s = csv_opt_number(f[8], kCsvColumns[8]);
    r.metrics.energy_per_token_j = csv_opt_number(f[9], kCsvColumns[9]);
    r.metrics.qps = csv_number(f[10], kCsvColumns[10]);
    r.metrics.epq_j = csv_number(f[11], kCsvColumns[11]);
    r.metrics.avg_power_w = csv_number(f[12], kCsvColumns[12]);
    r.tco_per_qps_usd = csv_opt_number(f[13], kCsvColumns[13]);
    out.push_back(std::move(r));
  }
  return out;
}

std::string emit_comparison(const ComparisonReport& report, RecordFormat format) {
  if (format == RecordFormat::kJson) {
    Json meta = meta_json();
    meta["digest"] = report.meta.digest;
    Json rows = Json::array();
    for (const auto& r : report.rows) {
      Json j = Json::object();
      j["scenario"] = r.scenario;
      j["baseline"] = r.baseline;
      j["candidate"] = r.candidate;
      j["metric"] = r.metric;
      j["baseline_value"] = r.baseline_value;
      j["candidate_value"] = r.candidate_value;
      j["ratio"] = r.ratio;
      j["higher_is_better"] = r.higher_is_better;
      rows.push_back(std::move(j));
    }
    Json doc = Json::object();
    doc["meta"] = std::move(meta);
    doc["baseline"] = report.baseline;
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "scenario,baseline,candidate,metric,baseline_value,candidate_value,ratio,"
         "higher_is_better,gain\n";
  for (const auto& r : report.rows) {
    out << csv_field(r.scenario) << ',' << csv_field(r.baseline) << ','
        << csv_field(r.candidate) << ',' << r.metric << ','
        << format_number(r.baseline_value) << ',' << format_number(r.candidate_value)
        << ',' << format_number(r.ratio) << ',' << (r.higher_is_better ? "true" : "false")
        << ',' << format_number(r.gain()) << '\n';
  }
  return out.str();
}

}  // namespace llmsim
