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

#include <cstdint>
#include <span>
#include <vector>

#include "bayescast/dates.hpp"
#include "bayescast/ingest.hpp"
#include "bayescast/models.hpp"

namespace bayescast {

/// Daily observations t = day / 7 for day = 0 .. n_days - 1 with
/// counts = logistic_mean(truth, t) + truth.sigma * N(0, 1) from Rng(seed).
[[nodiscard]] LogisticData synthetic_logistic(const LogisticParams& truth,
                                              std::size_t n_days, std::uint64_t seed);

/// The first `n` Monday-to-Friday dates on or after `first`.
[[nodiscard]] std::vector<Date> weekdays(Date first, std::size_t n);

/// Returns on `n_days` weekdays from `first`: noise_sd * N(0, 1) from
/// Rng(seed), plus shifts[k] on dates inside windows[k].
[[nodiscard]] ReturnSeries synthetic_returns(std::uint64_t seed, std::size_t n_days,
                                             Date first,
                                             std::span<const CrisisWindow> windows,
                                             std::span<const double> shifts,
                                             double noise_sd);
[[nodiscard]] ReturnSeries synthetic_returns(std::uint64_t seed, std::size_t n_days,
                                             Date first, const CrisisWindow& window,
                                             double shift, double noise_sd);

/// Prices 100 * prod(1 + r) with one extra leading day, so daily_returns of
/// the result reproduces `returns`.
[[nodiscard]] PriceSeries prices_from_returns(const ReturnSeries& returns, Date day_before);

}  // namespace bayescast
