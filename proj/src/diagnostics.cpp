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

#include "bayescast/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bayescast/errors.hpp"

namespace bayescast {

namespace {

void require_draws(const PosteriorSamples& samples) {
  if (samples.n_draws() < 4) {
    throw InputError("convergence diagnostics need at least 4 draws per chain, got " +
                     std::to_string(samples.n_draws()));
  }
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(xs.size() - 1);
}

bool is_constant(std::span<const double> xs) {
  return std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); });
}

}  // namespace

double ChainStatistic::value() const {
  if (degenerate_) throw std::logic_error("statistic is degenerate: constant");
  return value_;
}

std::vector<ChainStatistic> split_rhat(const PosteriorSamples& samples) {
  require_draws(samples);
  const std::size_t half = samples.n_draws() / 2;
  const std::size_t offset = samples.n_draws() - half;
  std::vector<ChainStatistic> out;
  for (std::size_t p = 0; p < samples.n_params(); ++p) {
    std::vector<std::vector<double>> pieces;
    for (std::size_t c = 0; c < samples.n_chains(); ++c) {
      const auto values = samples.chain_values(c, p);
      pieces.emplace_back(values.begin(), values.begin() + half);
      pieces.emplace_back(values.begin() + offset, values.end());
    }
    if (std::all_of(pieces.begin(), pieces.end(),
                    [](const auto& piece) { return is_constant(piece); })) {
      out.push_back(ChainStatistic::constant());
      continue;
    }
    const double n = static_cast<double>(half);
    const double m = static_cast<double>(pieces.size());
    std::vector<double> means;
    double within = 0.0;
    for (const auto& piece : pieces) {
      means.push_back(mean_of(piece));
      within += sample_variance(piece, means.back());
    }
    within /= m;
    const double grand = mean_of(means);
    double between = 0.0;
    for (const double mu : means) between += (mu - grand) * (mu - grand);
    between *= n / (m - 1.0);
    const double var_plus = (n - 1.0) / n * within + between / n;
    out.push_back(ChainStatistic::of(std::max(1.0, std::sqrt(var_plus / within))));
  }
  return out;
}

std::vector<ChainStatistic> effective_sample_size(const PosteriorSamples& samples) {
  require_draws(samples);
  const std::size_t n_chains = samples.n_chains();
  const std::size_t n = samples.n_draws();
  const double total = static_cast<double>(n_chains * n);
  const double nd = static_cast<double>(n);

  std::vector<ChainStatistic> out;
  for (std::size_t p = 0; p < samples.n_params(); ++p) {
    std::vector<std::vector<double>> chains;
    std::vector<double> means;
    bool all_constant = true;
    for (std::size_t c = 0; c < n_chains; ++c) {
      chains.push_back(samples.chain_values(c, p));
      means.push_back(mean_of(chains.back()));
      all_constant = all_constant && is_constant(chains.back());
    }
    if (all_constant) {
      out.push_back(ChainStatistic::constant());
      continue;
    }

    // Biased autocovariance of chain c at `lag`.
    auto autocov = [&](std::size_t c, std::size_t lag) {
      double acc = 0.0;
      const auto& xs = chains[c];
      for (std::size_t i = 0; i + lag < n; ++i) {
        acc += (xs[i] - means[c]) * (xs[i + lag] - means[c]);
      }
      return acc / nd;
    };
    auto mean_autocov = [&](std::size_t lag) {
      double acc = 0.0;
      for (std::size_t c = 0; c < n_chains; ++c) acc += autocov(c, lag);
      return acc / static_cast<double>(n_chains);
    };

    const double within = mean_autocov(0) * nd / (nd - 1.0);
    double var_plus = within * (nd - 1.0) / nd;
    if (n_chains > 1) {
      const double grand = mean_of(means);
      double between = 0.0;
      for (const double mu : means) between += (mu - grand) * (mu - grand);
      var_plus += between / static_cast<double>(n_chains - 1);
    }
    auto rho = [&](std::size_t lag) {
      return lag == 0 ? 1.0 : 1.0 - (within - mean_autocov(lag)) / var_plus;
    };

    // Sum of pairs rho(2k) + rho(2k+1) while positive, made monotone.
    double pair_sum = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
      double pair = rho(2 * k) + rho(2 * k + 1);
      if (!(pair > 0.0)) break;
      pair = std::min(pair, previous);
      pair_sum += pair;
      previous = pair;
    }
    const double tau = -1.0 + 2.0 * pair_sum;
    double ess = tau > 0.0 ? total / tau : total;
    ess = std::min(ess, total);
    out.push_back(ChainStatistic::of(ess));
  }
  return out;
}

bool DiagnosticsReport::converged(double threshold) const {
  return std::all_of(parameters.begin(), parameters.end(), [&](const auto& p) {
    return !p.rhat.degenerate() && p.rhat.value() <= threshold;
  });
}

DiagnosticsReport diagnose(const PosteriorSamples& samples) {
  DiagnosticsReport report;
  const auto rhat = split_rhat(samples);
  const auto ess = effective_sample_size(samples);
  for (std::size_t p = 0; p < samples.n_params(); ++p) {
    report.parameters.push_back({samples.param_names()[p], rhat[p], ess[p]});
  }
  for (const auto& stats : samples.chain_stats) {
    report.acceptance.push_back(stats.acceptance_rate);
  }
  report.warnings = samples.warnings;
  return report;
}

double mcse_mean(const PosteriorSamples& samples, std::size_t param) {
  const auto ess = effective_sample_size(samples)[param];
  const auto pooled = samples.pooled(param);
  const double mean = mean_of(pooled);
  const double sd = std::sqrt(sample_variance(pooled, mean));
  if (ess.degenerate()) return 0.0;
  return sd / std::sqrt(ess.value());
}

}  // namespace bayescast
