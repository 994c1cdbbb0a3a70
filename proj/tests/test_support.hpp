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

// Test-only helpers and independent oracles. Nothing here calls into the
// library code paths it is used to check.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bayescast/rng.hpp"
#include "bayescast/sampler.hpp"

namespace bayescast::testing {

inline PosteriorSamples from_chains(const std::vector<std::vector<double>>& chains,
                                    const std::string& name = "x") {
  std::vector<double> values;
  for (const auto& chain : chains) values.insert(values.end(), chain.begin(), chain.end());
  return PosteriorSamples({name}, chains.size(), chains.front().size(), std::move(values));
}

inline std::vector<double> iid_normal(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.normal();
  return out;
}

inline std::vector<double> ar1(std::uint64_t seed, std::size_t n, double phi) {
  Rng rng(seed);
  std::vector<double> out(n);
  double x = rng.normal() / std::sqrt(1.0 - phi * phi);
  for (auto& v : out) {
    x = phi * x + rng.normal();
    v = x;
  }
  return out;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (const double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

/// Gaussian elimination with partial pivoting on the normal equations,
/// written out long-hand. Returns the coefficient vector.
inline std::vector<double> brute_force_normal_equations(
    const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  const std::size_t p = rows.front().size();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) a[i][j] += rows[r][i] * rows[r][j];
      a[i][p] += rows[r][i] * y[r];
    }
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t i = 0; i < p; ++i) beta[i] = a[i][p] / a[i][i];
  return beta;
}

/// Straightforward re-evaluation of the logistic log posterior from its
/// written-out definition (normalized Normal likelihood, normalized priors on
/// the natural scale, log-Jacobian of the exp transforms).
struct LogisticOracle {
  double alpha_hn_scale;
  double beta_hn_scale;
  double t0_mean;
  double t0_sd;
  double sigma_hc_scale;

  double operator()(const std::vector<double>& t, const std::vector<double>& n,
                    double log_alpha, double log_beta, double t0, double log_sigma) const {
    const double pi = std::numbers::pi;
    const double alpha = std::exp(log_alpha);
    const double beta = std::exp(log_beta);
    const double sigma = std::exp(log_sigma);
    double lp = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double mu = alpha * 100000.0 / (1.0 + std::exp(-beta * (t[i] - t0)));
      const double r = n[i] - mu;
      lp += std::log(1.0 / (sigma * std::sqrt(2.0 * pi))) - r * r / (2.0 * sigma * sigma);
    }
    auto half_normal = [&](double x, double s) {
      return std::log(2.0 / (s * std::sqrt(2.0 * pi))) - x * x / (2.0 * s * s);
    };
    lp += half_normal(alpha, alpha_hn_scale);
    lp += half_normal(beta, beta_hn_scale);
    lp += std::log(1.0 / (t0_sd * std::sqrt(2.0 * pi))) -
          (t0 - t0_mean) * (t0 - t0_mean) / (2.0 * t0_sd * t0_sd);
    lp += std::log(2.0 / (pi * sigma_hc_scale * (1.0 + (sigma / sigma_hc_scale) *
                                                          (sigma / sigma_hc_scale))));
    lp += log_alpha + log_beta + log_sigma;
    return lp;
  }
};

}  // namespace bayescast::testing
