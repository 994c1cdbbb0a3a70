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

#include "bayescast/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayescast/errors.hpp"
#include "bayescast/models.hpp"
#include "bayescast/rng.hpp"

namespace bayescast {

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

std::string_view to_string(BandKind kind) {
  return kind == BandKind::predictive ? "predictive" : "mean_curve";
}

BandKind parse_band_kind(std::string_view name) {
  if (name == "mean_curve") return BandKind::mean_curve;
  if (name == "predictive") return BandKind::predictive;
  throw ConfigError("unknown band kind '" + std::string(name) +
                    "' (expected mean_curve or predictive)");
}

Date week_to_date(Date date0, double weeks) {
  return date0.plus_days(std::llround(7.0 * weeks));
}

ForecastSummary forecast(const PosteriorSamples& samples, Date date0,
                         std::span<const Date> horizon, BandKind kind,
                         std::uint64_t seed) {
  if (horizon.empty()) throw InputError("forecast horizon is empty");
  const std::size_t ia = samples.require("alpha");
  const std::size_t ib = samples.require("beta");
  const std::size_t it = samples.require("t0");
  const std::size_t is = samples.require("sigma");

  ForecastSummary out;
  out.kind = kind;
  out.dates.assign(horizon.begin(), horizon.end());
  for (const Date d : horizon) {
    out.weeks.push_back(static_cast<double>(days_between(date0, d)) / 7.0);
  }

  const std::size_t n = samples.n_chains() * samples.n_draws();
  const std::size_t m = horizon.size();
  // curves[j * n + draw]
  std::vector<double> curves(n * m);
  Rng rng(seed);
  std::size_t row = 0;
  for (std::size_t c = 0; c < samples.n_chains(); ++c) {
    for (std::size_t d = 0; d < samples.n_draws(); ++d, ++row) {
      const LogisticParams p{samples.at(c, d, ia), samples.at(c, d, ib),
                             samples.at(c, d, it), samples.at(c, d, is)};
      for (std::size_t j = 0; j < m; ++j) {
        double value = logistic_mean(p, out.weeks[j]);
        if (kind == BandKind::predictive) value += p.sigma * rng.normal();
        curves[j * n + row] = value;
      }
    }
  }
  for (auto& band : out.bands) band.resize(m);
  out.mean.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::span<double> column(curves.data() + j * n, n);
    out.mean[j] = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n);
    std::sort(column.begin(), column.end());
    for (std::size_t l = 0; l < kBandLevels.size(); ++l) {
      out.bands[l][j] = quantile_sorted(column, kBandLevels[l]);
    }
  }
  return out;
}

PeakEstimate estimate_peak(const PosteriorSamples& samples, Date date0) {
  const std::size_t ia = samples.require("alpha");
  const std::size_t ib = samples.require("beta");
  const std::size_t it = samples.require("t0");
  std::vector<double> t0 = samples.pooled(it);
  const std::vector<double> alpha = samples.pooled(ia);
  const std::vector<double> beta = samples.pooled(ib);
  std::vector<double> heights(t0.size());
  for (std::size_t i = 0; i < t0.size(); ++i) {
    heights[i] = alpha[i] * kCaseScale * beta[i] * 0.25;
  }
  std::sort(t0.begin(), t0.end());
  std::sort(heights.begin(), heights.end());

  PeakEstimate out;
  out.lower_weeks = quantile_sorted(t0, 0.05);
  out.median_weeks = quantile_sorted(t0, 0.5);
  out.upper_weeks = quantile_sorted(t0, 0.95);
  out.lower_date = week_to_date(date0, out.lower_weeks);
  out.median_date = week_to_date(date0, out.median_weeks);
  out.upper_date = week_to_date(date0, out.upper_weeks);
  for (std::size_t l = 0; l < kBandLevels.size(); ++l) {
    out.peak_rate[l] = quantile_sorted(heights, kBandLevels[l]);
  }
  return out;
}

BoxStats box_stats(std::string label, std::span<const double> values) {
  if (values.empty()) throw InputError("box statistics of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxStats out;
  out.label = std::move(label);
  out.count = sorted.size();
  out.q1 = quantile_sorted(sorted, 0.25);
  out.median = quantile_sorted(sorted, 0.5);
  out.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = out.q3 - out.q1;
  const double low_fence = out.q1 - 1.5 * iqr;
  const double high_fence = out.q3 + 1.5 * iqr;
  out.whisker_low = *std::lower_bound(sorted.begin(), sorted.end(), low_fence);
  out.whisker_high = *std::prev(std::upper_bound(sorted.begin(), sorted.end(), high_fence));
  // Interpolated quartiles can fall outside the data-based whiskers only by
  // rounding; keep the box ordering intact.
  out.whisker_low = std::min(out.whisker_low, out.q1);
  out.whisker_high = std::max(out.whisker_high, out.q3);

  out.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  double ss = 0.0;
  for (const double v : sorted) ss += (v - out.mean) * (v - out.mean);
  out.std_dev = sorted.size() > 1 ? std::sqrt(ss / static_cast<double>(sorted.size() - 1)) : 0.0;
  return out;
}

BoxStats box_stats(const PosteriorSamples& samples, std::string_view param) {
  const std::size_t idx = samples.require(param);
  const auto pooled = samples.pooled(idx);
  return box_stats(std::string(param), pooled);
}

std::vector<RankedTicker> rank_tickers(std::span<const TickerWeights> summaries,
                                       std::string_view crisis, RankDirection direction,
                                       std::size_t k) {
  if (summaries.empty()) throw InputError("no ticker summaries to rank");
  std::vector<RankedTicker> ranked;
  bool known = false;
  for (const auto& s : summaries) {
    const auto it = s.weights.find(std::string(crisis));
    if (it == s.weights.end()) continue;
    known = true;
    if (it->second) ranked.push_back({s.ticker, it->second->median});
  }
  if (!known) throw InputError("unknown crisis '" + std::string(crisis) + "'");
  std::sort(ranked.begin(), ranked.end(), [direction](const auto& a, const auto& b) {
    if (a.median != b.median) {
      return direction == RankDirection::most_negative ? a.median < b.median
                                                       : a.median > b.median;
    }
    return a.ticker < b.ticker;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace bayescast
