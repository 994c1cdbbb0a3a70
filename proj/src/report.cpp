// Copyright 2026 The bayescast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bayescast/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "bayescast/csv.hpp"
#include "bayescast/errors.hpp"

namespace bayescast {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kLevelKeys[] = {"q05", "q25", "q50", "q75", "q95"};

std::string escape_xml(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo;
  double hi;
  double pixel_lo;
  double pixel_hi;

  [[nodiscard]] double operator()(double v) const {
    if (hi == lo) return 0.5 * (pixel_lo + pixel_hi);
    return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo);
  }
};

void svg_open(std::ostringstream& svg, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_number(kWidth)
      << "\" height=\"" << svg_number(kHeight) << "\" viewBox=\"0 0 " << svg_number(kWidth)
      << ' ' << svg_number(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << svg_number(kWidth) << "\" height=\""
      << svg_number(kHeight) << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << svg_number(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape_xml(title) << "</text>\n";
}

void line(std::ostringstream& svg, double x1, double y1, double x2, double y2,
          const char* stroke, double width = 1.0) {
  svg << "<line x1=\"" << svg_number(x1) << "\" y1=\"" << svg_number(y1) << "\" x2=\""
      << svg_number(x2) << "\" y2=\"" << svg_number(y2) << "\" stroke=\"" << stroke
      << "\" stroke-width=\"" << svg_number(width) << "\"/>\n";
}

void text(std::ostringstream& svg, double x, double y, const std::string& s,
          const char* anchor = "middle") {
  svg << "<text x=\"" << svg_number(x) << "\" y=\"" << svg_number(y) << "\" text-anchor=\""
      << anchor << "\">" << escape_xml(s) << "</text>\n";
}

std::string tick_label(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", value);
  return buf;
}

void y_ticks(std::ostringstream& svg, const Axis& y, double x_left, double x_right) {
  for (int i = 0; i <= 4; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 4.0;
    line(svg, x_left - 4, y(v), x_left, y(v), "black");
    line(svg, x_left, y(v), x_right, y(v), "#e0e0e0");
    text(svg, x_left - 8, y(v) + 4, tick_label(v), "end");
  }
}

}  // namespace

std::string svg_number(double value) {
  if (value == 0.0 || !std::isfinite(value)) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

Json to_json(const ChainStatistic& stat) {
  if (stat.degenerate()) return ChainStatistic::kDegenerateLabel;
  return stat.value();
}

Json to_json(const BoxStats& box) {
  Json j;
  j["label"] = box.label;
  j["median"] = box.median;
  j["q1"] = box.q1;
  j["q3"] = box.q3;
  j["whisker_low"] = box.whisker_low;
  j["whisker_high"] = box.whisker_high;
  j["mean"] = box.mean;
  j["std_dev"] = box.std_dev;
  j["count"] = box.count;
  return j;
}

Json to_json(const DiagnosticsReport& report) {
  Json j;
  j["converged"] = report.converged();
  j["rhat_threshold"] = 1.05;
  Json params = Json::array();
  for (const auto& p : report.parameters) {
    params.push_back({{"name", p.name}, {"rhat", to_json(p.rhat)}, {"ess", to_json(p.ess)}});
  }
  j["parameters"] = std::move(params);
  j["acceptance"] = report.acceptance;
  j["warnings"] = report.warnings;
  return j;
}

Json to_json(const ForecastSummary& summary) {
  Json j;
  j["kind"] = std::string(to_string(summary.kind));
  j["levels"] = std::vector<double>(kBandLevels.begin(), kBandLevels.end());
  Json rows = Json::array();
  for (std::size_t d = 0; d < summary.dates.size(); ++d) {
    Json row;
    row["date"] = summary.dates[d].iso();
    row["week"] = summary.weeks[d];
    row["mean"] = summary.mean[d];
    for (std::size_t i = 0; i < kBandLevels.size(); ++i) row[kLevelKeys[i]] = summary.bands[i][d];
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const PeakEstimate& peak) {
  Json j;
  j["median_date"] = peak.median_date.iso();
  j["lower_date"] = peak.lower_date.iso();
  j["upper_date"] = peak.upper_date.iso();
  j["median_weeks"] = peak.median_weeks;
  j["lower_weeks"] = peak.lower_weeks;
  j["upper_weeks"] = peak.upper_weeks;
  Json rate;
  for (std::size_t i = 0; i < kBandLevels.size(); ++i) rate[kLevelKeys[i]] = peak.peak_rate[i];
  j["peak_cases_per_week"] = std::move(rate);
  return j;
}

std::vector<ParameterDiagnostics> diagnostics_from_json(const Json& doc) {
  auto stat = [](const Json& v, const std::string& what) {
    if (v.is_string() && v.get<std::string>() == ChainStatistic::kDegenerateLabel) {
      return ChainStatistic::constant();
    }
    if (v.is_number()) return ChainStatistic::of(v.get<double>());
    throw ParseError("diagnostics JSON: bad " + what + " entry");
  };
  if (!doc.is_object() || !doc.contains("parameters") || !doc["parameters"].is_array()) {
    throw ParseError("diagnostics JSON: missing 'parameters' array");
  }
  std::vector<ParameterDiagnostics> out;
  for (const auto& p : doc["parameters"]) {
    if (!p.is_object() || !p.contains("name") || !p["name"].is_string() ||
        !p.contains("rhat") || !p.contains("ess")) {
      throw ParseError("diagnostics JSON: parameter entries need name, rhat and ess");
    }
    out.push_back({p["name"].get<std::string>(), stat(p["rhat"], "rhat"), stat(p["ess"], "ess")});
  }
  return out;
}

void write_forecast_csv(std::ostream& out, const ForecastSummary& summary) {
  out << "date,week,mean";
  for (const char* key : kLevelKeys) out << ',' << key;
  out << '\n';
  for (std::size_t d = 0; d < summary.dates.size(); ++d) {
    out << summary.dates[d].iso() << ',' << format_double(summary.weeks[d]) << ','
        << format_double(summary.mean[d]);
    for (const auto& band : summary.bands) out << ',' << format_double(band[d]);
    out << '\n';
  }
}

std::string forecast_svg(const CaseSeries& observed, const ForecastSummary& summary,
                         const std::string& title) {
  Date first = summary.dates.empty() ? observed.date0 : summary.dates.front();
  Date last = summary.dates.empty() ? observed.date0 : summary.dates.back();
  double y_max = 0.0;
  for (std::size_t i = 0; i < observed.dates.size(); ++i) {
    first = std::min(first, observed.dates[i]);
    last = std::max(last, observed.dates[i]);
    y_max = std::max(y_max, observed.cumulative[i]);
  }
  for (const double v : summary.bands.back()) y_max = std::max(y_max, v);
  if (y_max <= 0.0) y_max = 1.0;

  const Axis x{0.0, static_cast<double>(days_between(first, last)), kLeft, kWidth - kRight};
  const Axis y{0.0, y_max * 1.05, kHeight - kBottom, kTop};
  auto px = [&](Date d) { return x(static_cast<double>(days_between(first, d))); };

  std::ostringstream svg;
  svg_open(svg, title);
  y_ticks(svg, y, kLeft, kWidth - kRight);
  line(svg, kLeft, y(0.0), kWidth - kRight, y(0.0), "black");
  line(svg, kLeft, kTop, kLeft, kHeight - kBottom, "black");
  for (int i = 0; i <= 4; ++i) {
    const Date d = first.plus_days(static_cast<std::int64_t>(std::llround(x.hi * i / 4.0)));
    line(svg, px(d), y(0.0), px(d), y(0.0) + 4, "black");
    text(svg, px(d), y(0.0) + 18, d.iso(), i == 0 ? "start" : i == 4 ? "end" : "middle");
  }
  text(svg, (kLeft + kWidth - kRight) / 2, kHeight - 16, "date");

  if (!summary.dates.empty()) {
    svg << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (std::size_t d = 0; d < summary.dates.size(); ++d) {
      svg << svg_number(px(summary.dates[d])) << ',' << svg_number(y(summary.bands[4][d])) << ' ';
    }
    for (std::size_t d = summary.dates.size(); d-- > 0;) {
      svg << svg_number(px(summary.dates[d])) << ',' << svg_number(y(summary.bands[0][d]));
      if (d != 0) svg << ' ';
    }
    svg << "\"/>\n<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
    for (std::size_t d = 0; d < summary.dates.size(); ++d) {
      if (d != 0) svg << ' ';
      svg << svg_number(px(summary.dates[d])) << ',' << svg_number(y(summary.median()[d]));
    }
    svg << "\"/>\n";
  }
  for (std::size_t i = 0; i < observed.dates.size(); ++i) {
    svg << "<circle cx=\"" << svg_number(px(observed.dates[i])) << "\" cy=\""
        << svg_number(y(observed.cumulative[i])) << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
  }
  text(svg, kWidth - kRight - 4, kTop + 14,
       "points: observed, line: median, band: 5-95% (" + std::string(to_string(summary.kind)) + ")",
       "end");
  svg << "</svg>\n";
  return svg.str();
}

std::string box_plot_svg(std::span<const BoxGroup> groups, const std::string& title) {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_boxes = 0;
  for (const auto& g : groups) {
    for (const auto& [label, box] : g.boxes) {
      ++n_boxes;
      if (!box) continue;
      lo = std::min(lo, box->whisker_low);
      hi = std::max(hi, box->whisker_high);
    }
  }
  const double pad = hi > lo ? 0.05 * (hi - lo) : 1.0;
  const Axis y{lo - pad, hi + pad, kHeight - kBottom, kTop};
  const double slots = static_cast<double>(n_boxes + groups.size());
  const double slot = slots > 0 ? (kWidth - kLeft - kRight) / slots : 0.0;

  std::ostringstream svg;
  svg_open(svg, title);
  y_ticks(svg, y, kLeft, kWidth - kRight);
  line(svg, kLeft, kTop, kLeft, kHeight - kBottom, "black");
  line(svg, kLeft, y(0.0), kWidth - kRight, y(0.0), "#555555");

  double cursor = kLeft + 0.5 * slot;
  for (const auto& g : groups) {
    const double group_start = cursor;
    for (const auto& [label, box] : g.boxes) {
      const double cx = cursor + 0.5 * slot;
      const double half = 0.3 * slot;
      if (box) {
        line(svg, cx, y(box->whisker_low), cx, y(box->q1), "black");
        line(svg, cx, y(box->q3), cx, y(box->whisker_high), "black");
        line(svg, cx - half / 2, y(box->whisker_low), cx + half / 2, y(box->whisker_low), "black");
        line(svg, cx - half / 2, y(box->whisker_high), cx + half / 2, y(box->whisker_high), "black");
        svg << "<rect x=\"" << svg_number(cx - half) << "\" y=\"" << svg_number(y(box->q3))
            << "\" width=\"" << svg_number(2 * half) << "\" height=\""
            << svg_number(y(box->q1) - y(box->q3))
            << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        line(svg, cx - half, y(box->median), cx + half, y(box->median), "#08519c", 2.0);
      } else {
        text(svg, cx, y(0.0) - 6, "n/a");
      }
      text(svg, cx, kHeight - kBottom + 16, label);
      cursor += slot;
    }
    text(svg, 0.5 * (group_start + cursor), kHeight - kBottom + 34, g.name);
    cursor += slot;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bayescast
