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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bayescast/sampler.hpp"

namespace bayescast {

struct OptimizeResult {
  std::vector<double> argmax;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex maximization of `objective`. `initial_step` sets the
/// simplex edge along each axis. Non-finite objective values count as -inf.
[[nodiscard]] OptimizeResult nelder_mead_maximize(const LogDensity& objective,
                                                  std::span<const double> start,
                                                  std::span<const double> initial_step,
                                                  std::size_t max_iterations = 5000,
                                                  double tolerance = 1e-10);

/// Gaussian approximation of a log density around its mode.
struct LaplaceApproximation {
  std::vector<double> mode;
  double log_density_at_mode = 0.0;
  /// Inverse of the negated Hessian; nullopt if that is not positive definite.
  std::optional<Eigen::MatrixXd> covariance;
};

/// Maximizes from `start` (two Nelder-Mead passes) and inverts the negated
/// Hessian. The Hessian is central differences of `gradient` when given,
/// otherwise second differences of `log_density`.
[[nodiscard]] LaplaceApproximation laplace_approximation(
    const LogDensity& log_density, std::span<const double> start,
    std::span<const double> initial_step, const LogDensityGradient& gradient = {});

}  // namespace bayescast
