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

#include <algorithm>
#include <cmath>
#include <random>

#include "bayescast/analytics.hpp"
#include "bayescast/errors.hpp"
#include "bayescast/models.hpp"
#include "bayescast/rng.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bayescast;

namespace {

Date iso(const char* text) { return *Date::parse_iso(text); }

// One chain of (alpha, beta, t0, sigma) draws.
PosteriorSamples logistic_draws(const std::vector<std::array<double, 4>>& draws) {
  std::vector<double> values;
  for (const auto& d : draws) values.insert(values.end(), d.begin(), d.end());
  return PosteriorSamples({"alpha", "beta", "t0", "sigma"}, 1, draws.size(), std::move(values));
}

std::vector<std::array<double, 4>> random_draws(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<std::array<double, 4>> out(n);
  for (auto& d : out) {
    d = {std::exp(0.5 * rng.normal()), std::exp(0.3 * rng.normal()) * 0.8,
         6.0 + rng.normal(), 100.0 * std::exp(rng.normal())};
  }
  return out;
}

std::vector<Date> daily(Date first, std::size_t n) {
  std::vector<Date> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(first.plus_days(static_cast<std::int64_t>(i)));
  return out;
}

TickerWeights weights(std::string ticker, double median) {
  TickerWeights w;
  w.ticker = std::move(ticker);
  BoxStats b;
  b.median = median;
  w.weights["coronavirus"] = b;
  return w;
}

std::vector<std::string> tickers(const std::vector<RankedTicker>& ranked) {
  std::vector<std::string> out;
  for (const auto& r : ranked) out.push_back(r.ticker);
  return out;
}

}  // namespace

TEST_CASE("quantile rule") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  CHECK(quantile(xs, 0.0) == 1.0);
  CHECK(quantile(xs, 1.0) == 5.0);
  CHECK(quantile(xs, 0.5) == 3.0);
  CHECK(quantile(xs, 0.25) == 2.0);
  CHECK(quantile({10, 20}, 0.05) == 10.5);
  CHECK(quantile({7}, 0.9) == 7.0);
}

TEST_CASE("point-mass forecast") {
  const auto samples = logistic_draws(std::vector(20, std::array{1.0, 1.0, 0.0, 1e-9}));
  const Date d0 = iso("2020-03-01");
  const std::vector<Date> horizon{d0};
  const auto f = forecast(samples, d0, horizon, BandKind::mean_curve);
  CHECK(f.mean[0] == 50000.0);
  for (const auto& band : f.bands) CHECK(band[0] == 50000.0);
}

TEST_CASE("two-draw forecast follows the quantile rule") {
  const auto samples =
      logistic_draws({{1.0, 1.0, 0.0, 1.0}, {2.0, 1.0, 0.0, 1.0}});
  const Date d0 = iso("2020-03-01");
  const std::vector<Date> horizon{d0};
  const auto f = forecast(samples, d0, horizon, BandKind::mean_curve);
  // Curves are 50000 and 100000 at t = 0.
  CHECK(f.mean[0] == 75000.0);
  CHECK(f.bands[0][0] == doctest::Approx(50000.0 + 0.05 * 50000.0).epsilon(1e-14));
  CHECK(f.bands[4][0] == doctest::Approx(50000.0 + 0.95 * 50000.0).epsilon(1e-14));
  CHECK(f.bands[0][0] >= 50000.0);
  CHECK(f.bands[4][0] <= 100000.0);
}

TEST_CASE("forecast properties over random draws") {
  const Date d0 = iso("2020-03-01");
  const auto horizon = daily(d0.plus_days(-3), 120);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto draws = random_draws(seed, 200);
    const auto samples = logistic_draws(draws);
    for (const auto kind : {BandKind::mean_curve, BandKind::predictive}) {
      const auto f = forecast(samples, d0, horizon, kind, seed);
      for (std::size_t j = 0; j < horizon.size(); ++j) {
        for (std::size_t i = 1; i < kBandLevels.size(); ++i) {
          CHECK(f.bands[i - 1][j] <= f.bands[i][j]);
        }
      }
      if (kind == BandKind::mean_curve) {
        for (std::size_t j = 1; j < horizon.size(); ++j) CHECK(f.median()[j - 1] <= f.median()[j]);
        // Mean is the plain average of the per-draw curves.
        for (const std::size_t j : {std::size_t{0}, std::size_t{40}, std::size_t{119}}) {
          const double t = (static_cast<double>(j) - 3.0) / 7.0;
          double sum = 0.0;
          for (const auto& d : draws) {
            sum += d[0] * 1e5 / (1.0 + std::exp(-d[1] * (t - d[2])));
          }
          const double expected = sum / static_cast<double>(draws.size());
          CHECK(std::abs(f.mean[j] - expected) <= 1e-12 * expected);
        }
      }
    }
  }
}

TEST_CASE("predictive bands are wider and seeded") {
  const auto samples = logistic_draws(random_draws(1, 400));
  const Date d0 = iso("2020-03-01");
  const auto horizon = daily(d0, 10);
  const auto mean_curve = forecast(samples, d0, horizon, BandKind::mean_curve);
  const auto a = forecast(samples, d0, horizon, BandKind::predictive, 9);
  const auto b = forecast(samples, d0, horizon, BandKind::predictive, 9);
  CHECK(a.bands[4] == b.bands[4]);
  CHECK(a.bands[4][5] - a.bands[0][5] > mean_curve.bands[4][5] - mean_curve.bands[0][5]);
}

TEST_CASE("forecast needs the logistic parameters") {
  const PosteriorSamples samples({"alpha", "beta"}, 1, 1, {1.0, 1.0});
  const Date d0 = iso("2020-03-01");
  const std::vector<Date> horizon{d0};
  CHECK_THROWS_AS((void)forecast(samples, d0, horizon, BandKind::mean_curve), InputError);
  CHECK_THROWS_AS((void)estimate_peak(samples, d0), InputError);
}

TEST_CASE("peak examples") {
  const Date d0 = iso("2020-03-01");
  SUBCASE("point mass at ten weeks") {
    const auto p = estimate_peak(logistic_draws(std::vector(5, std::array{1.0, 1.0, 10.0, 1.0})), d0);
    CHECK(p.median_date == d0.plus_days(70));
    CHECK(p.lower_date == p.median_date);
    CHECK(p.upper_date == p.median_date);
  }
  SUBCASE("three equally weighted inflection times") {
    const auto p = estimate_peak(
        logistic_draws({{1, 1, 9, 1}, {1, 1, 10, 1}, {1, 1, 11, 1}}), d0);
    CHECK(p.median_date == d0.plus_days(70));
    CHECK(p.lower_date <= p.median_date);
    CHECK(p.median_date <= p.upper_date);
  }
  SUBCASE("peak height") {
    const auto p = estimate_peak(logistic_draws(std::vector(3, std::array{1.0, 2.0, 4.0, 1.0})), d0);
    for (const double rate : p.peak_rate) CHECK(rate == 50000.0);
  }
  CHECK(week_to_date(d0, 1.0 / 7.0 * 3.4) == d0.plus_days(3));
  CHECK(week_to_date(d0, 1.0 / 7.0 * 3.6) == d0.plus_days(4));
}

TEST_CASE("per-draw peak is the grid argmax of daily cases") {
  Rng rng(77);
  const Date d0 = iso("2020-01-01");
  for (int i = 0; i < 300; ++i) {
    LogisticParams p;
    p.alpha = std::exp(rng.normal());
    p.beta = 0.1 + 3.0 * rng.uniform();
    p.t0 = 20.0 * rng.uniform();
    const auto est = estimate_peak(logistic_draws({{p.alpha, p.beta, p.t0, 1.0}}), d0);
    const double peak = daily_new_cases(p, est.median_weeks);
    for (int g = -1000; g <= 1000; ++g) {
      const double t = p.t0 + 0.01 * g;
      REQUIRE(daily_new_cases(p, t) <= peak);
    }
    CHECK(est.median_weeks == p.t0);
    CHECK(std::abs(est.peak_rate[2] - p.alpha * 1e5 * p.beta / 4.0) <= 1e-12 * est.peak_rate[2]);
  }
}

TEST_CASE("box stats examples") {
  const std::vector<double> five{1, 2, 3, 4, 5};
  const auto b = box_stats("x", five);
  CHECK(b.median == 3.0);
  CHECK(b.q1 == 2.0);
  CHECK(b.q3 == 4.0);
  CHECK(b.whisker_low == 1.0);
  CHECK(b.whisker_high == 5.0);
  CHECK(b.count == 5);

  const std::vector<double> flat(9, 2.5);
  const auto c = box_stats("c", flat);
  CHECK(c.median == 2.5);
  CHECK(c.q1 == 2.5);
  CHECK(c.q3 == 2.5);
  CHECK(c.whisker_low == 2.5);
  CHECK(c.whisker_high == 2.5);
  CHECK(c.std_dev == 0.0);

  const auto normal = testing::iid_normal(3, 10000);
  CHECK(std::abs(box_stats("n", normal).std_dev - 1.0) < 0.03);

  // An outlier lies beyond the upper whisker.
  const std::vector<double> outlier{1, 2, 3, 4, 5, 100};
  CHECK(box_stats("o", outlier).whisker_high == 5.0);
}

TEST_CASE("box stats ordering and shift invariance") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(1 + rng.next_u64() % 200);
    for (auto& x : xs) x = rng.normal() * std::exp(rng.normal());
    const auto b = box_stats("b", xs);
    CHECK(b.whisker_low <= b.q1);
    CHECK(b.q1 <= b.median);
    CHECK(b.median <= b.q3);
    CHECK(b.q3 <= b.whisker_high);

    const double c = 50.0 * rng.normal();
    auto shifted = xs;
    for (auto& x : shifted) x += c;
    const auto s = box_stats("s", shifted);
    const double scale = 1e-12 * (std::abs(c) + 10.0);
    CHECK(std::abs(s.median - b.median - c) <= scale);
    CHECK(std::abs(s.q1 - b.q1 - c) <= scale);
    CHECK(std::abs(s.q3 - b.q3 - c) <= scale);
    CHECK(std::abs(s.whisker_low - b.whisker_low - c) <= scale);
    CHECK(std::abs(s.whisker_high - b.whisker_high - c) <= scale);
    CHECK(std::abs(s.mean - b.mean - c) <= scale);
    CHECK(std::abs(s.std_dev - b.std_dev) <= scale);
  }
}

TEST_CASE("box stats of samples by name") {
  const auto samples = logistic_draws(random_draws(2, 50));
  CHECK(box_stats(samples, "beta").count == 50);
  CHECK_THROWS_AS((void)box_stats(samples, "gamma"), InputError);
}

TEST_CASE("rank tickers") {
  const std::vector<TickerWeights> set{weights("A", -0.03), weights("B", 0.01),
                                       weights("C", -0.01)};
  CHECK(tickers(rank_tickers(set, "coronavirus", RankDirection::most_negative, 2)) ==
        std::vector<std::string>{"A", "C"});
  CHECK(tickers(rank_tickers(set, "coronavirus", RankDirection::most_positive, 1)) ==
        std::vector<std::string>{"B"});
  const std::vector<TickerWeights> tie{weights("Y", 0.02), weights("X", 0.02)};
  CHECK(tickers(rank_tickers(tie, "coronavirus", RankDirection::most_positive, 2)) ==
        std::vector<std::string>{"X", "Y"});
  CHECK_THROWS_AS((void)rank_tickers(set, "dotcom", RankDirection::most_negative, 1), InputError);

  auto with_gap = set;
  with_gap.push_back({"D", {{"coronavirus", std::nullopt}}});
  CHECK(tickers(rank_tickers(with_gap, "coronavirus", RankDirection::most_negative, 10)) ==
        std::vector<std::string>{"A", "C", "B"});
}

TEST_CASE("rank tickers ignores input order") {
  Rng rng(4);
  std::mt19937_64 shuffler(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<TickerWeights> set;
    const std::size_t n = 1 + rng.next_u64() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse medians so ties are common.
      set.push_back(weights("T" + std::to_string(i), 0.01 * static_cast<double>(rng.next_u64() % 5)));
    }
    const std::size_t k = 1 + rng.next_u64() % n;
    const auto dir = trial % 2 ? RankDirection::most_positive : RankDirection::most_negative;
    const auto expected = tickers(rank_tickers(set, "coronavirus", dir, k));
    CHECK(expected.size() == k);
    for (int s = 0; s < 5; ++s) {
      std::shuffle(set.begin(), set.end(), shuffler);
      CHECK(tickers(rank_tickers(set, "coronavirus", dir, k)) == expected);
    }
  }
}
