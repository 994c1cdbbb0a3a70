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

#include "bayescast/synthetic.hpp"

#include <chrono>

#include "bayescast/errors.hpp"
#include "bayescast/rng.hpp"

namespace bayescast {

LogisticData synthetic_logistic(const LogisticParams& truth, std::size_t n_days,
                                std::uint64_t seed) {
  Rng rng(seed);
  LogisticData data;
  for (std::size_t day = 0; day < n_days; ++day) {
    const double t = static_cast<double>(day) / 7.0;
    data.t.push_back(t);
    data.counts.push_back(logistic_mean(truth, t) + truth.sigma * rng.normal());
  }
  return data;
}

std::vector<Date> weekdays(Date first, std::size_t n) {
  std::vector<Date> out;
  for (Date d = first; out.size() < n; d = d.plus_days(1)) {
    const std::chrono::weekday wd{d.sys_days()};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(d);
  }
  return out;
}

ReturnSeries synthetic_returns(std::uint64_t seed, std::size_t n_days, Date first,
                               std::span<const CrisisWindow> windows,
                               std::span<const double> shifts, double noise_sd) {
  if (windows.size() != shifts.size()) {
    throw InputError("synthetic_returns: one shift per window required");
  }
  Rng rng(seed);
  ReturnSeries out;
  out.ticker = "SYNTH";
  out.dates = weekdays(first, n_days);
  for (const Date d : out.dates) {
    double r = noise_sd * rng.normal();
    for (std::size_t k = 0; k < windows.size(); ++k) {
      if (windows[k].contains(d)) r += shifts[k];
    }
    out.returns.push_back(r);
  }
  return out;
}

ReturnSeries synthetic_returns(std::uint64_t seed, std::size_t n_days, Date first,
                               const CrisisWindow& window, double shift,
                               double noise_sd) {
  return synthetic_returns(seed, n_days, first, std::span(&window, 1),
                           std::span(&shift, 1), noise_sd);
}

PriceSeries prices_from_returns(const ReturnSeries& returns, Date day_before) {
  PriceSeries out;
  out.ticker = returns.ticker;
  out.dates.push_back(day_before);
  out.close.push_back(100.0);
  for (std::size_t i = 0; i < returns.returns.size(); ++i) {
    out.dates.push_back(returns.dates[i]);
    out.close.push_back(out.close.back() * (1.0 + returns.returns[i]));
  }
  return out;
}

}  // namespace bayescast
