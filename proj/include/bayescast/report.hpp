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

#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bayescast/analytics.hpp"
#include "bayescast/diagnostics.hpp"
#include "bayescast/ingest.hpp"
#include "bayescast/models.hpp"
#include "json.hpp"

namespace bayescast {

using Json = nlohmann::ordered_json;

/// Marker used in place of a summary for a crisis window without data.
inline constexpr const char* kUnidentified = "unidentified";

[[nodiscard]] Json to_json(const ChainStatistic& stat);
[[nodiscard]] Json to_json(const BoxStats& box);
[[nodiscard]] Json to_json(const DiagnosticsReport& report);
[[nodiscard]] Json to_json(const ForecastSummary& summary);
[[nodiscard]] Json to_json(const PeakEstimate& peak);

/// Reads the "parameters" block written by to_json(DiagnosticsReport).
/// Throws ParseError on schema mismatch.
[[nodiscard]] std::vector<ParameterDiagnostics> diagnostics_from_json(const Json& doc);

/// date,week,mean,q05,q25,q50,q75,q95
void write_forecast_csv(std::ostream& out, const ForecastSummary& summary);

/// Observed points, median curve and 5-95% band against calendar dates.
[[nodiscard]] std::string forecast_svg(const CaseSeries& observed,
                                       const ForecastSummary& summary,
                                       const std::string& title);

struct BoxGroup {
  std::string name;
  /// (label, stats); nullopt draws a placeholder for an unidentified entry.
  std::vector<std::pair<std::string, std::optional<BoxStats>>> boxes;
};

/// One cluster of boxes per group, with a zero line.
[[nodiscard]] std::string box_plot_svg(std::span<const BoxGroup> groups,
                                       const std::string& title);

/// Fixed six-significant-digit rendering used for every SVG coordinate.
[[nodiscard]] std::string svg_number(double value);

}  // namespace bayescast
