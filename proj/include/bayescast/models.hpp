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

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bayescast/sampler.hpp"

namespace bayescast {

/// Curve amplitude multiplier: alpha * kCaseScale is the asymptotic case count.
inline constexpr double kCaseScale = 1e5;

/// One point of the logistic growth model. t0 is in weeks since date0,
/// beta is per week.
struct LogisticParams {
  double alpha = 1.0;
  double beta = 1.0;
  double t0 = 0.0;
  double sigma = 1.0;

  [[nodiscard]] bool valid() const noexcept;
};

/// Cumulative cases alpha*1e5 / (1 + exp(-beta (t - t0))). Saturates instead
/// of overflowing for large |beta (t - t0)|.
[[nodiscard]] double logistic_mean(const LogisticParams& params, double t);

/// d/dt of logistic_mean, in cases per week. Symmetric about t0, where it
/// peaks at alpha*1e5*beta/4.
[[nodiscard]] double daily_new_cases(const LogisticParams& params, double t);

// ---------------------------------------------------------------------------
// Priors

struct HalfNormal {
  double scale;
};
struct Normal {
  double mean;
  double scale;
};
struct HalfCauchy {
  double scale;
};

/// Prior on one parameter, in that parameter's native units.
using Prior = std::variant<HalfNormal, Normal, HalfCauchy>;

/// Normalized log density of `prior` at `x` (half-distributions on x >= 0).
[[nodiscard]] double prior_log_density(const Prior& prior, double x);
/// d/dx of prior_log_density.
[[nodiscard]] double prior_log_density_derivative(const Prior& prior, double x);
[[nodiscard]] std::string describe(const Prior& prior);
/// Inverse of describe: "normal(m, s)", "half_normal(s)" or "half_cauchy(s)".
/// Throws ConfigError on anything else.
[[nodiscard]] Prior parse_prior(std::string_view text);
/// Throws ConfigError when a scale is not strictly positive.
void validate_prior(const Prior& prior, std::string_view param);

struct LogisticPriors {
  Prior alpha;
  Prior beta;
  Prior t0;
  Prior sigma;
};

struct CrisisPriors {
  Prior intercept = Normal{0.0, 0.05};
  Prior weight = Normal{0.0, 0.05};
  Prior sigma = HalfCauchy{0.02};
  /// Prior on nu - 1.
  Prior nu_minus_one = HalfNormal{30.0};
};

// ---------------------------------------------------------------------------
// Logistic growth model

struct LogisticData {
  std::vector<double> t;       ///< weeks since date0
  std::vector<double> counts;  ///< cumulative cases
};

/// Data-scaled weakly informative defaults.
[[nodiscard]] LogisticPriors default_logistic_priors(const LogisticData& data);

/// Posterior over raw = (log alpha, log beta, t0, log sigma), Jacobian included.
class LogisticModel {
 public:
  static constexpr std::size_t kDim = 4;

  /// Throws InputError on length mismatch, fewer than 4 points or negative
  /// counts; ConfigError on invalid priors.
  LogisticModel(LogisticData data, LogisticPriors priors);

  [[nodiscard]] const LogisticData& data() const noexcept { return data_; }
  [[nodiscard]] const LogisticPriors& priors() const noexcept { return priors_; }

  [[nodiscard]] double log_likelihood(const LogisticParams& params) const;
  [[nodiscard]] double log_prior(const LogisticParams& params) const;
  [[nodiscard]] double log_posterior(std::span<const double> raw) const;
  /// Returns log_posterior(raw) and writes its gradient.
  double log_posterior_gradient(std::span<const double> raw,
                                std::span<double> grad) const;

  [[nodiscard]] static LogisticParams to_params(std::span<const double> raw);
  [[nodiscard]] static std::vector<double> to_raw(const LogisticParams& params);
  [[nodiscard]] static std::vector<std::string> param_names();

  /// Rough starting point from the data (max count, half-max crossing).
  [[nodiscard]] LogisticParams initial_guess() const;

 private:
  LogisticData data_;
  LogisticPriors priors_;
};

/// Sum of Normal(logistic_mean(t_i), sigma) log densities of the counts.
/// Throws InputError when t and counts differ in length.
[[nodiscard]] double logistic_log_likelihood(const LogisticParams& params,
                                             const LogisticData& data);

/// Free-function form: throws InputError when t and counts differ in length.
[[nodiscard]] double logistic_log_posterior(std::span<const double> raw,
                                            const LogisticData& data,
                                            const LogisticPriors& priors);

// ---------------------------------------------------------------------------
// Crisis-indicator return regression

enum class Likelihood { normal, student_t };

[[nodiscard]] std::string_view to_string(Likelihood likelihood);
[[nodiscard]] Likelihood parse_likelihood(std::string_view name);

struct CrisisParams {
  double intercept = 0.0;
  std::vector<double> weights;
  double sigma = 1.0;
  /// Student-t degrees of freedom; ignored by the normal likelihood.
  double nu = 30.0;
};

/// Posterior over raw = (intercept, weights..., log sigma[, log(nu - 1)]).
/// The nu coordinate exists only for the Student-t likelihood with nu
/// estimated; pass `fixed_nu` to hold it constant instead.
class CrisisModel {
 public:
  /// `indicators` is n_obs x n_weights of {0,1}; no intercept column.
  CrisisModel(std::vector<double> returns, Eigen::MatrixXd indicators,
              std::vector<std::string> weight_names, CrisisPriors priors,
              Likelihood likelihood, std::optional<double> fixed_nu = std::nullopt);

  [[nodiscard]] std::size_t dim() const noexcept;
  [[nodiscard]] std::size_t n_weights() const noexcept {
    return static_cast<std::size_t>(indicators_.cols());
  }
  [[nodiscard]] bool estimates_nu() const noexcept;
  [[nodiscard]] Likelihood likelihood() const noexcept { return likelihood_; }

  [[nodiscard]] double log_likelihood(const CrisisParams& params) const;
  [[nodiscard]] double log_prior(const CrisisParams& params) const;
  [[nodiscard]] double log_posterior(std::span<const double> raw) const;
  double log_posterior_gradient(std::span<const double> raw,
                                std::span<double> grad) const;

  [[nodiscard]] CrisisParams to_params(std::span<const double> raw) const;
  [[nodiscard]] std::vector<double> to_raw(const CrisisParams& params) const;
  /// intercept, weight names..., sigma[, nu]
  [[nodiscard]] std::vector<std::string> param_names() const;

 private:
  std::vector<double> returns_;
  Eigen::MatrixXd indicators_;
  std::vector<std::string> weight_names_;
  CrisisPriors priors_;
  Likelihood likelihood_;
  std::optional<double> fixed_nu_;
};

/// Free-function form. `design` is the full design matrix whose first column
/// is the intercept; throws InputError when rows do not align with `returns`.
[[nodiscard]] double crisis_log_posterior(std::span<const double> raw,
                                          std::span<const double> returns,
                                          const Eigen::MatrixXd& design,
                                          const CrisisPriors& priors,
                                          Likelihood likelihood);

// ---------------------------------------------------------------------------
// Ordinary least squares

struct OlsResult {
  std::vector<double> coefficients;
  double residual_sum_of_squares = 0.0;
  /// sqrt(diag(s^2 (X^T X)^{-1})); empty when rows == columns.
  std::vector<double> standard_errors;
};

/// Normal-equations fit with a pivot-checked Cholesky solve. Throws
/// SingularDesignError naming the first column that is linearly dependent on
/// the columns before it.
[[nodiscard]] OlsResult ols_fit(const Eigen::MatrixXd& design,
                                std::span<const double> y,
                                std::span<const std::string> column_names = {});

}  // namespace bayescast
