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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bayescast/dates.hpp"
#include "bayescast/sampler.hpp"

namespace bayescast {

/// Sample quantile by linear interpolation between order statistics:
/// h = (n - 1) p, result x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);
[[nodiscard]] double quantile(std::vector<double> values, double p);

inline constexpr std::array<double, 5> kBandLevels{0.05, 0.25, 0.5, 0.75, 0.95};

enum class BandKind { mean_curve, predictive };

[[nodiscard]] std::string_view to_string(BandKind kind);
[[nodiscard]] BandKind parse_band_kind(std::string_view name);

struct ForecastSummary {
  BandKind kind = BandKind::mean_curve;
  std::vector<Date> dates;
  std::vector<double> weeks;
  std::vector<double> mean;
  /// bands[i][j]: quantile kBandLevels[i] at dates[j].
  std::array<std::vector<double>, kBandLevels.size()> bands;

  [[nodiscard]] const std::vector<double>& median() const { return bands[2]; }
};

/// Pushes every draw of (alpha, beta, t0, sigma) through the logistic curve
/// at each horizon date. The predictive kind adds Normal(0, sigma) noise drawn
/// from an Rng seeded with `seed`.
[[nodiscard]] ForecastSummary forecast(const PosteriorSamples& samples, Date date0,
                                       std::span<const Date> horizon, BandKind kind,
                                       std::uint64_t seed = 0);

struct PeakEstimate {
  Date median_date;
  Date lower_date;  ///< 5%
  Date upper_date;  ///< 95%
  double median_weeks = 0.0;
  double lower_weeks = 0.0;
  double upper_weeks = 0.0;
  /// Peak of daily_new_cases (cases per week) at kBandLevels.
  std::array<double, kBandLevels.size()> peak_rate{};
};

/// Per draw the peak is at t0 with height alpha * 1e5 * beta / 4. Weeks map
/// to dates as date0 + round(7 t) days.
[[nodiscard]] PeakEstimate estimate_peak(const PosteriorSamples& samples, Date date0);

[[nodiscard]] Date week_to_date(Date date0, double weeks);

struct BoxStats {
  std::string label;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  /// Most extreme data inside [q1 - 1.5 IQR, q3 + 1.5 IQR].
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t count = 0;
};

[[nodiscard]] BoxStats box_stats(std::string label, std::span<const double> values);
/// Pooled over chains. Throws InputError for an unknown parameter.
[[nodiscard]] BoxStats box_stats(const PosteriorSamples& samples, std::string_view param);

/// Posterior weight summaries of one ticker; nullopt marks an unidentified
/// window (no trading days inside it).
struct TickerWeights {
  std::string ticker;
  std::map<std::string, std::optional<BoxStats>> weights;
};

enum class RankDirection { most_negative, most_positive };

struct RankedTicker {
  std::string ticker;
  double median = 0.0;
};

/// Top k tickers by posterior median weight for `crisis`; ties go to the
/// lexicographically smaller ticker. Unidentified entries are skipped.
/// Throws InputError when no summary knows `crisis` or the input is empty.
[[nodiscard]] std::vector<RankedTicker> rank_tickers(std::span<const TickerWeights> summaries,
                                                     std::string_view crisis,
                                                     RankDirection direction,
                                                     std::size_t k);

}  // namespace bayescast
