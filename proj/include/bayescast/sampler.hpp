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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bayescast {

enum class Kernel { metropolis, hmc };

[[nodiscard]] std::string_view to_string(Kernel kernel);
[[nodiscard]] Kernel parse_kernel(std::string_view name);

/// Log density over an unconstrained real vector. Must be a pure function of
/// its argument: chains call it concurrently.
using LogDensity = std::function<double(std::span<const double>)>;

/// Writes the gradient into `grad` and returns the log density.
using LogDensityGradient =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Sampler settings. There is deliberately no default seed.
struct ChainConfig {
  explicit ChainConfig(std::uint64_t seed_value) : seed(seed_value) {}

  std::size_t n_chains = 4;
  std::size_t n_warmup = 1000;
  std::size_t n_draws = 1000;
  std::uint64_t seed;
  Kernel kernel = Kernel::metropolis;
  /// Unset: 0.44 (Metropolis, dim 1), 0.234 (Metropolis, dim > 1), 0.8 (HMC).
  std::optional<double> target_accept;
  std::size_t hmc_leapfrog_steps = 16;
  /// Metropolis: starting per-dimension proposal scale. HMC: starting step size.
  double initial_step_size = 1.0;
  /// Worker threads for running chains; 0 means one per hardware thread.
  std::size_t threads = 0;
  /// Test hook: pins every Metropolis proposal scale (may be 0) and disables
  /// adaptation.
  std::optional<double> fixed_proposal_scale;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;
  [[nodiscard]] double resolved_target_accept(std::size_t dim) const;
};

/// Per-chain sampler bookkeeping.
struct ChainStats {
  double acceptance_rate = 0.0;
  /// Final Metropolis scale multiplier (first dimension) or HMC step size.
  double step_size = 0.0;
  bool stuck = false;
};

/// Draws laid out as [chain, draw, parameter]. Immutable once built.
class PosteriorSamples {
 public:
  /// Throws InputError if sizes disagree or any draw is non-finite.
  PosteriorSamples(std::vector<std::string> param_names, std::size_t n_chains,
                   std::size_t n_draws, std::vector<double> values);

  [[nodiscard]] std::size_t n_chains() const noexcept { return n_chains_; }
  [[nodiscard]] std::size_t n_draws() const noexcept { return n_draws_; }
  [[nodiscard]] std::size_t n_params() const noexcept { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& param_names() const noexcept {
    return names_;
  }

  [[nodiscard]] double at(std::size_t chain, std::size_t draw,
                          std::size_t param) const {
    return values_[(chain * n_draws_ + draw) * names_.size() + param];
  }
  [[nodiscard]] std::span<const double> draw(std::size_t chain,
                                             std::size_t index) const {
    return {values_.data() + (chain * n_draws_ + index) * names_.size(),
            names_.size()};
  }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const;
  /// Throws InputError naming the parameter when absent.
  [[nodiscard]] std::size_t require(std::string_view name) const;

  [[nodiscard]] std::vector<double> chain_values(std::size_t chain,
                                                 std::size_t param) const;
  /// All chains concatenated, chain-major.
  [[nodiscard]] std::vector<double> pooled(std::size_t param) const;

  /// Apply `fn` to every draw; `fn` fills a vector of new_names.size() values.
  [[nodiscard]] PosteriorSamples transform(
      std::vector<std::string> new_names,
      const std::function<void(std::span<const double>, std::span<double>)>& fn)
      const;

  std::vector<ChainStats> chain_stats;
  std::vector<std::string> warnings;
  std::optional<ChainConfig> config;

 private:
  std::vector<std::string> names_;
  std::size_t n_chains_;
  std::size_t n_draws_;
  std::vector<double> values_;
};

/// Optional extras for sample().
struct SampleOptions {
  /// Analytic gradient for HMC. Empty: central finite differences with step
  /// 1e-6 * max(1, |x_i|), accurate to roughly 1e-8 relative for smooth targets.
  LogDensityGradient gradient;
  /// Defaults to theta0, theta1, ...
  std::vector<std::string> param_names;
  /// One starting point per chain; overrides `init` when non-empty.
  std::vector<std::vector<double>> chain_inits;
  /// Metropolis proposal shape or HMC inverse metric. Identity when unset.
  std::optional<Eigen::MatrixXd> covariance;
};

/// Runs config.n_chains chains of the chosen kernel. Output is a pure function
/// of (inputs, config.seed); chain i only depends on (seed, i, inputs).
[[nodiscard]] PosteriorSamples sample(const LogDensity& log_density,
                                      std::size_t dim,
                                      std::span<const double> init,
                                      const ChainConfig& config,
                                      const SampleOptions& options = {});

/// Central-difference gradient; returns log_density(x).
double finite_difference_gradient(const LogDensity& log_density,
                                  std::span<const double> x,
                                  std::span<double> grad);

/// Draw CSV: header `chain,draw,<param...>`, one row per (chain, draw),
/// values in shortest round-trip form.
void write_draws_csv(std::ostream& out, const PosteriorSamples& samples);

/// Throws ParseError on schema problems, including truncated files (row count
/// not equal to chains x draws).
[[nodiscard]] PosteriorSamples read_draws_csv(std::istream& in);

}  // namespace bayescast
