// SPDX-License-Identifier: Apache-2.0
//
// Comparison tables, record emission (CSV/JSON) and static SVG charts.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "llmsim/scenario.hpp"

namespace llmsim {

inline constexpr std::string_view kToolName = "llmsim";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class MetricId {
  kTtft,
  kEncodeEnergy,
  kTokensPerS,
  kEnergyPerToken,
  kQps,
  kEpq,
  kAvgPower,
  kTcoPerQps,
};

struct MetricInfo {
  MetricId id;
  std::string_view name;
  bool higher_is_better;
};

std::span<const MetricInfo> all_metrics();
const MetricInfo& metric_info(MetricId id);
std::optional<MetricId> parse_metric(std::string_view name);
std::optional<double> metric_value(const RunRecord& r, MetricId id);

struct ComparisonRow {
  std::string scenario;
  std::string baseline;
  std::string candidate;
  std::string metric;
  double baseline_value = 0.0;
  double candidate_value = 0.0;
  double ratio = 0.0;  // candidate / baseline
  bool higher_is_better = true;

  // > 1 when the candidate is better, whatever the metric's orientation.
  double gain() const { return higher_is_better ? ratio : 1.0 / ratio; }
  // (ratio - 1) * 100 for higher-is-better metrics, (1 - ratio) * 100
  // (reduction) otherwise.
  double improvement_pct() const {
    return higher_is_better ? (ratio - 1.0) * 100.0 : (1.0 - ratio) * 100.0;
  }

  bool operator==(const ComparisonRow&) const = default;
};

struct ReportMeta {
  std::string tool{kToolName};
  std::string version{kToolVersion};
  std::string digest;  // FNV-1a of the input records

  bool operator==(const ReportMeta&) const = default;
};

struct ComparisonReport {
  std::string baseline;
  ReportMeta meta;
  std::vector<ComparisonRow> rows;

  bool operator==(const ComparisonReport&) const = default;
};

// Every run is grouped by scenario; within a scenario each run other than
// the one whose deployment equals `baseline` yields one row per metric.
ComparisonReport compare(std::span<const RunRecord> runs, std::string_view baseline);

// Concatenates rows; baseline becomes "mixed" when they differ.
void append(ComparisonReport& into, const ComparisonReport& more);

enum class RecordFormat { kCsv, kJson };

std::optional<RecordFormat> parse_record_format(std::string_view text);

// CSV columns, in order.
std::span<const std::string_view> csv_columns();

std::string emit_records(std::span<const RunRecord> runs, RecordFormat format);
// CSV records only carry the metrics that have a column; encode energy comes
// back as NaN and metric_value() reports it absent.
std::vector<RunRecord> parse_records(std::string_view document, RecordFormat format);

std::string emit_comparison(const ComparisonReport& report, RecordFormat format);

struct ChartFile {
  std::string name;
  std::string svg;
};

// One grouped-bar panel per headline metric, values normalized to the
// baseline of each group.
std::vector<ChartFile> emit_charts(const ComparisonReport& report);

}  // namespace llmsim
