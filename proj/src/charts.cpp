// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>

#include "llmsim/error.hpp"
#include "llmsim/report.hpp"

namespace llmsim {

namespace {

struct Panel {
  MetricId metric;
  const char* file;
  const char* title;
};

constexpr std::array<Panel, 6> kPanels = {{
    {MetricId::kTtft, "ttft.svg", "Time to first token"},
    {MetricId::kEncodeEnergy, "encode_energy.svg", "Encode energy per query"},
    {MetricId::kTokensPerS, "tokens_per_s.svg", "Decode tokens per second"},
    {MetricId::kEnergyPerToken, "energy_per_token.svg", "Decode energy per token"},
    {MetricId::kQps, "qps.svg", "Queries per second"},
    {MetricId::kEpq, "epq.svg", "Energy per query"},
}};

constexpr std::array<const char*, 6> kColors = {"#4c72b0", "#dd8452", "#55a868",
                                                "#c44e52", "#8172b3", "#937860"};

std::string fixed(double v, int precision) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return std::string(buf, end);
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Bar {
  std::string label;
  double value;
};

struct Group {
  std::string label;
  std::vector<Bar> bars;
};

std::vector<Group> collect(const ComparisonReport& report, std::string_view metric) {
  std::vector<Group> groups;
  for (const auto& row : report.rows) {
    if (row.metric != metric) continue;
    const std::string label = row.scenario + " vs " + row.baseline;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.label == label; });
    if (it == groups.end()) {
      groups.push_back({label, {{row.baseline, 1.0}}});
      it = std::prev(groups.end());
    }
    it->bars.push_back({row.candidate, row.ratio});
  }
  return groups;
}

std::string render(const Panel& panel, const std::vector<Group>& groups) {
  constexpr int kBarWidth = 28;
  constexpr int kGroupGap = 40;
  constexpr int kLeft = 60;
  constexpr int kTop = 40;
  constexpr int kPlotHeight = 220;
  constexpr int kBottom = 120;

  int plot_width = 0;
  double max_value = 1.0;
  for (const auto& g : groups) {
    plot_width += static_cast<int>(g.bars.size()) * kBarWidth + kGroupGap;
    for (const auto& b : g.bars) max_value = std::max(max_value, b.value);
  }
  const int width = kLeft + std::max(plot_width, 200) + 20;
  const int height = kTop + kPlotHeight + kBottom;
  const double scale = kPlotHeight / (max_value * 1.1);
  const int axis_y = kTop + kPlotHeight;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << escape(panel.title) << " (normalized to baseline)</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << axis_y << "\" x2=\"" << width - 10
      << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << axis_y << "\" stroke=\"black\"/>\n";
  const int unit_y = axis_y - static_cast<int>(scale * 1.0 + 0.5);
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << unit_y << "\" x2=\"" << width - 10
      << "\" y2=\"" << unit_y << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << unit_y + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">1.0</text>\n";

  int x = kLeft + kGroupGap / 2;
  for (const auto& g : groups) {
    svg << "<g class=\"group\">\n";
    for (std::size_t i = 0; i < g.bars.size(); ++i) {
      const auto& b = g.bars[i];
      const double h = b.value * scale;
      svg << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << fixed(axis_y - h, 2)
          << "\" width=\"" << kBarWidth - 4 << "\" height=\"" << fixed(h, 2)
          << "\" fill=\"" << kColors[i % kColors.size()] << "\"><title>"
          << escape(b.label) << ": " << fixed(b.value, 4) << "</title></rect>\n";
      svg << "<text x=\"" << x + (kBarWidth - 4) / 2 << "\" y=\"" << fixed(axis_y - h - 3, 2)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
          << fixed(b.value, 2) << "</text>\n";
      x += kBarWidth;
    }
    const int label_x = x - static_cast<int>(g.bars.size()) * kBarWidth / 2;
    svg << "<text x=\"" << label_x << "\" y=\"" << axis_y + 14
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\" "
           "transform=\"rotate(-30 "
        << label_x << ' ' << axis_y + 14 << ")\">" << escape(g.label) << "</text>\n";
    svg << "</g>\n";
    x += kGroupGap;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<ChartFile> emit_charts(const ComparisonReport& report) {
  if (report.rows.empty()) {
    throw ValidationError("charts: empty comparison (no candidate besides the baseline)");
  }
  std::vector<ChartFile> out;
  for (const Panel& panel : kPanels) {
    out.push_back({panel.file, render(panel, collect(report, metric_info(panel.metric).name))});
  }
  return out;
}

}  // namespace llmsim
