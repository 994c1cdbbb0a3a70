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

#include "bayescast/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayescast/rng.hpp"

namespace bayescast {

namespace {

// Separates chain-start draws from the sampler's own per-chain streams.
constexpr std::uint64_t kInitStreamSalt = 0x5eed'1a17'0000'0000ULL;

struct Problem {
  LogDensity log_density;
  LogDensityGradient gradient;
  std::vector<std::vector<double>> starts;
  std::vector<double> initial_step;
  std::vector<std::string> raw_names;
  std::vector<std::string> natural_names;
  std::function<void(std::span<const double>, std::span<double>)> to_natural;
};

ModelFit run(const Problem& problem, const ChainConfig& config) {
  const std::size_t dim = problem.initial_step.size();

  LaplaceApproximation best;
  bool have_best = false;
  for (const auto& start : problem.starts) {
    if (!std::isfinite(problem.log_density(start))) continue;
    auto candidate = laplace_approximation(problem.log_density, start,
                                           problem.initial_step, problem.gradient);
    if (!have_best || candidate.log_density_at_mode > best.log_density_at_mode ||
        (!best.covariance && candidate.covariance &&
         candidate.log_density_at_mode >= best.log_density_at_mode - 1e-9)) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  if (!have_best) best.mode = problem.starts.front();

  Eigen::MatrixXd cov;
  if (best.covariance) {
    cov = *best.covariance;
  } else {
    cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
      const auto i = static_cast<Eigen::Index>(d);
      cov(i, i) = 0.01 * problem.initial_step[d] * problem.initial_step[d];
    }
  }
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

  SampleOptions options;
  options.gradient = problem.gradient;
  options.param_names = problem.raw_names;
  options.covariance = cov;
  for (std::size_t c = 0; c < config.n_chains; ++c) {
    Rng rng = Rng::substream(config.seed ^ kInitStreamSalt, c);
    std::vector<double> init = best.mode;
    for (int attempt = 0; attempt < 20; ++attempt) {
      Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
      for (auto& v : z) v = rng.normal();
      const Eigen::VectorXd offset = chol * z;
      std::vector<double> candidate(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        candidate[d] = best.mode[d] + offset[static_cast<Eigen::Index>(d)];
      }
      if (std::isfinite(problem.log_density(candidate))) {
        init = std::move(candidate);
        break;
      }
    }
    options.chain_inits.push_back(std::move(init));
  }

  ChainConfig tuned = config;
  if (tuned.kernel == Kernel::metropolis) {
    tuned.initial_step_size *= 2.38 / std::sqrt(static_cast<double>(dim));
  }
  PosteriorSamples raw = sample(problem.log_density, dim, best.mode, tuned, options);
  raw.config = config;
  PosteriorSamples natural = raw.transform(problem.natural_names, problem.to_natural);
  return ModelFit{std::move(raw), std::move(natural), std::move(best)};
}

}  // namespace

ModelFit fit_logistic(const LogisticModel& model, const ChainConfig& config) {
  Problem problem;
  problem.log_density = [&model](std::span<const double> raw) {
    return model.log_posterior(raw);
  };
  problem.gradient = [&model](std::span<const double> raw, std::span<double> grad) {
    return model.log_posterior_gradient(raw, grad);
  };
  const LogisticParams guess = model.initial_guess();
  for (const double beta : {0.25, 0.5, 1.0, 2.0}) {
    LogisticParams start = guess;
    start.beta = beta;
    problem.starts.push_back(LogisticModel::to_raw(start));
  }
  const auto& t = model.data().t;
  const double span = std::max(t.back() - t.front(), 1.0);
  problem.initial_step = {0.5, 0.5, 0.25 * span, 0.5};
  problem.raw_names = {"log_alpha", "log_beta", "t0", "log_sigma"};
  problem.natural_names = LogisticModel::param_names();
  problem.to_natural = [](std::span<const double> raw, std::span<double> out) {
    const LogisticParams p = LogisticModel::to_params(raw);
    out[0] = p.alpha;
    out[1] = p.beta;
    out[2] = p.t0;
    out[3] = p.sigma;
  };
  return run(problem, config);
}

ModelFit fit_crisis(const CrisisModel& model, const ChainConfig& config) {
  Problem problem;
  problem.log_density = [&model](std::span<const double> raw) {
    return model.log_posterior(raw);
  };
  problem.gradient = [&model](std::span<const double> raw, std::span<double> grad) {
    return model.log_posterior_gradient(raw, grad);
  };
  CrisisParams start;
  start.weights.assign(model.n_weights(), 0.0);
  start.sigma = 0.01;
  start.nu = 5.0;
  problem.starts.push_back(model.to_raw(start));
  start.sigma = 0.03;
  start.nu = 30.0;
  problem.starts.push_back(model.to_raw(start));

  problem.initial_step.assign(model.dim(), 0.01);
  problem.initial_step[1 + model.n_weights()] = 0.5;
  if (model.estimates_nu()) problem.initial_step.back() = 1.0;

  problem.raw_names = model.param_names();
  problem.raw_names[1 + model.n_weights()] = "log_sigma";
  if (model.estimates_nu()) problem.raw_names.back() = "log_nu_minus_one";
  problem.natural_names = model.param_names();
  problem.to_natural = [&model](std::span<const double> raw, std::span<double> out) {
    const CrisisParams p = model.to_params(raw);
    std::size_t i = 0;
    out[i++] = p.intercept;
    for (const double w : p.weights) out[i++] = w;
    out[i++] = p.sigma;
    if (model.estimates_nu()) out[i++] = p.nu;
  };
  return run(problem, config);
}

}  // namespace bayescast
