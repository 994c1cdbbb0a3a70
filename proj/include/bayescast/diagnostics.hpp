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

#include <string>
#include <vector>

#include "bayescast/sampler.hpp"

namespace bayescast {

/// A convergence statistic that is either a number or the
/// "degenerate: constant" flag (every chain holds a single value).
class ChainStatistic {
 public:
  [[nodiscard]] static ChainStatistic constant() { return ChainStatistic(); }
  [[nodiscard]] static ChainStatistic of(double value) {
    ChainStatistic s;
    s.value_ = value;
    s.degenerate_ = false;
    return s;
  }

  [[nodiscard]] bool degenerate() const noexcept { return degenerate_; }
  /// Throws std::logic_error when degenerate.
  [[nodiscard]] double value() const;

  static constexpr const char* kDegenerateLabel = "degenerate: constant";

 private:
  ChainStatistic() = default;
  double value_ = 0.0;
  bool degenerate_ = true;
};

/// Split R-hat per parameter over 2 * n_chains half-chains, floored at 1.
/// Requires n_draws >= 4.
[[nodiscard]] std::vector<ChainStatistic> split_rhat(const PosteriorSamples& samples);

/// Multi-chain ESS with Geyer's initial-positive-sequence truncation, clamped
/// to (0, n_chains * n_draws]. Requires n_draws >= 4.
[[nodiscard]] std::vector<ChainStatistic> effective_sample_size(
    const PosteriorSamples& samples);

struct ParameterDiagnostics {
  std::string name;
  ChainStatistic rhat;
  ChainStatistic ess;
};

struct DiagnosticsReport {
  std::vector<ParameterDiagnostics> parameters;
  /// Empty when the samples were not produced by sample().
  std::vector<double> acceptance;
  std::vector<std::string> warnings;

  /// True when every R-hat is a number no larger than `threshold`.
  [[nodiscard]] bool converged(double threshold = 1.05) const;
};

[[nodiscard]] DiagnosticsReport diagnose(const PosteriorSamples& samples);

/// Monte Carlo standard error of the mean: pooled sd / sqrt(ESS).
[[nodiscard]] double mcse_mean(const PosteriorSamples& samples, std::size_t param);

}  // namespace bayescast
