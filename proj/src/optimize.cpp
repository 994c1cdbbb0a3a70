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

#include "bayescast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bayescast/errors.hpp"

namespace bayescast {

namespace {

double safe_eval(const LogDensity& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd hessian_from_gradient(const LogDensityGradient& gradient,
                                      std::span<const double> x) {
  const std::size_t dim = x.size();
  Eigen::MatrixXd h(dim, dim);
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> up(dim);
  std::vector<double> down(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    gradient(probe, up);
    probe[j] = x[j] - step;
    gradient(probe, down);
    probe[j] = x[j];
    for (std::size_t i = 0; i < dim; ++i) h(i, j) = (up[i] - down[i]) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd hessian_from_values(const LogDensity& f, std::span<const double> x) {
  const std::size_t dim = x.size();
  Eigen::MatrixXd h(dim, dim);
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> steps(dim);
  for (std::size_t i = 0; i < dim; ++i) steps[i] = 1e-4 * std::max(1.0, std::abs(x[i]));
  const double center = f(x);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      if (i == j) {
        probe[i] = x[i] + steps[i];
        const double up = f(probe);
        probe[i] = x[i] - steps[i];
        const double down = f(probe);
        probe[i] = x[i];
        h(i, i) = (up - 2.0 * center + down) / (steps[i] * steps[i]);
        continue;
      }
      double acc = 0.0;
      for (const int si : {1, -1}) {
        for (const int sj : {1, -1}) {
          probe[i] = x[i] + si * steps[i];
          probe[j] = x[j] + sj * steps[j];
          acc += si * sj * f(probe);
        }
      }
      probe[i] = x[i];
      probe[j] = x[j];
      h(i, j) = h(j, i) = acc / (4.0 * steps[i] * steps[j]);
    }
  }
  return h;
}

}  // namespace

OptimizeResult nelder_mead_maximize(const LogDensity& objective,
                                    std::span<const double> start,
                                    std::span<const double> initial_step,
                                    std::size_t max_iterations, double tolerance) {
  const std::size_t dim = start.size();
  if (initial_step.size() != dim) {
    throw InputError("initial_step length does not match the start point");
  }
  // Standard coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += initial_step[i];
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = safe_eval(objective, simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  std::vector<double> trial(dim);
  std::vector<double> trial2(dim);
  auto along = [&](double coef, std::span<double> out, const std::vector<double>& worst) {
    for (std::size_t d = 0; d < dim; ++d) {
      out[d] = centroid[d] + coef * (centroid[d] - worst[d]);
    }
  };

  OptimizeResult result;
  for (; result.iterations < max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - (dim > 0 ? 1 : 0)];

    const double spread = std::abs(values[best] - values[worst]);
    if (std::isfinite(values[worst]) &&
        spread <= tolerance * (std::abs(values[best]) + tolerance)) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    along(1.0, trial, simplex[worst]);
    const double reflected = safe_eval(objective, trial);
    if (reflected > values[best]) {
      along(2.0, trial2, simplex[worst]);
      const double expanded = safe_eval(objective, trial2);
      if (expanded > reflected) {
        simplex[worst] = trial2;
        values[worst] = expanded;
      } else {
        simplex[worst] = trial;
        values[worst] = reflected;
      }
      continue;
    }
    if (reflected > values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = reflected;
      continue;
    }
    const bool outside = reflected > values[worst];
    along(outside ? 0.5 : -0.5, trial2, simplex[worst]);
    const double contracted = safe_eval(objective, trial2);
    if (contracted > (outside ? reflected : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = contracted;
      continue;
    }
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      }
      values[i] = safe_eval(objective, simplex[i]);
    }
  }
  const auto best_it = std::max_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  result.argmax = simplex[best];
  result.value = values[best];
  return result;
}

LaplaceApproximation laplace_approximation(const LogDensity& log_density,
                                           std::span<const double> start,
                                           std::span<const double> initial_step,
                                           const LogDensityGradient& gradient) {
  auto first = nelder_mead_maximize(log_density, start, initial_step);
  // A restart from the first optimum rebuilds a fresh simplex and escapes
  // premature collapse.
  std::vector<double> small_step(initial_step.begin(), initial_step.end());
  for (double& s : small_step) s *= 0.1;
  auto second = nelder_mead_maximize(log_density, first.argmax, small_step);

  LaplaceApproximation out;
  out.mode = second.argmax;
  out.log_density_at_mode = second.value;
  const Eigen::MatrixXd h = gradient ? hessian_from_gradient(gradient, out.mode)
                                     : hessian_from_values(log_density, out.mode);
  const Eigen::MatrixXd precision = -h;
  if (!precision.allFinite()) return out;
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) return out;
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(h.rows(), h.cols()));
  cov = 0.5 * (cov + cov.transpose());
  if (Eigen::LLT<Eigen::MatrixXd>(cov).info() == Eigen::Success && cov.allFinite()) {
    out.covariance = std::move(cov);
  }
  return out;
}

}  // namespace bayescast
