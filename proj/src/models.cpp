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

#include "bayescast/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>

#include "bayescast/csv.hpp"
#include "bayescast/errors.hpp"

namespace bayescast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// s(x) (1 - s(x)), evaluated on |x| so it is exactly symmetric and never
/// rounds above 1/4.
double sigmoid_slope(double x) {
  const double ax = std::abs(x);
  if (ax < 1.0) {
    const double s = 1.0 / (1.0 + std::exp(-ax));
    return s * (1.0 - s);  // 1 - s is exact for s in [0.5, 1)
  }
  const double e = std::exp(-ax);
  return e / ((1.0 + e) * (1.0 + e));
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

bool is_half(const Prior& prior) { return !std::holds_alternative<Normal>(prior); }

/// d/du [log p(e^u) + u]: prior on a log-transformed positive parameter.
double log_scale_prior_derivative(const Prior& prior, double value) {
  return value * prior_log_density_derivative(prior, value) + 1.0;
}

}  // namespace

bool LogisticParams::valid() const noexcept {
  return alpha > 0.0 && beta > 0.0 && sigma > 0.0 && std::isfinite(alpha) &&
         std::isfinite(beta) && std::isfinite(t0) && std::isfinite(sigma);
}

double logistic_mean(const LogisticParams& params, double t) {
  return params.alpha * kCaseScale * sigmoid(params.beta * (t - params.t0));
}

double daily_new_cases(const LogisticParams& params, double t) {
  return params.alpha * kCaseScale * params.beta *
         sigmoid_slope(params.beta * (t - params.t0));
}

// ---------------------------------------------------------------------------

double prior_log_density(const Prior& prior, double x) {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Normal>) {
          const double z = (x - p.mean) / p.scale;
          return -kHalfLog2Pi - std::log(p.scale) - 0.5 * z * z;
        } else if constexpr (std::is_same_v<T, HalfNormal>) {
          if (x < 0.0) return kNegInf;
          const double z = x / p.scale;
          return std::numbers::ln2 - kHalfLog2Pi - std::log(p.scale) - 0.5 * z * z;
        } else {
          if (x < 0.0) return kNegInf;
          const double z = x / p.scale;
          return std::numbers::ln2 - std::log(std::numbers::pi) - std::log(p.scale) -
                 std::log1p(z * z);
        }
      },
      prior);
}

double prior_log_density_derivative(const Prior& prior, double x) {
  return std::visit(
      [x](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return -(x - p.mean) / (p.scale * p.scale);
        } else if constexpr (std::is_same_v<T, HalfNormal>) {
          return -x / (p.scale * p.scale);
        } else {
          return -2.0 * x / (p.scale * p.scale + x * x);
        }
      },
      prior);
}

std::string describe(const Prior& prior) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return "normal(" + format_double(p.mean) + ", " + format_double(p.scale) + ")";
        } else if constexpr (std::is_same_v<T, HalfNormal>) {
          return "half_normal(" + format_double(p.scale) + ")";
        } else {
          return "half_cauchy(" + format_double(p.scale) + ")";
        }
      },
      prior);
}

Prior parse_prior(std::string_view text) {
  const std::string raw(trim(text));
  const auto open = raw.find('(');
  const auto close = raw.rfind(')');
  auto fail = [&]() -> ConfigError {
    return ConfigError("cannot parse prior '" + raw +
                       "' (expected normal(m, s), half_normal(s) or half_cauchy(s))");
  };
  if (open == std::string::npos || close != raw.size() - 1 || close < open) throw fail();
  const std::string family = to_lower(trim(std::string_view(raw).substr(0, open)));
  std::vector<double> args;
  std::string_view rest = std::string_view(raw).substr(open + 1, close - open - 1);
  while (true) {
    const auto comma = rest.find(',');
    const auto value = parse_double(trim(rest.substr(0, comma)));
    if (!value) throw fail();
    args.push_back(*value);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  Prior prior = HalfNormal{1.0};
  if (family == "normal" && args.size() == 2) {
    prior = Normal{args[0], args[1]};
  } else if (family == "half_normal" && args.size() == 1) {
    prior = HalfNormal{args[0]};
  } else if (family == "half_cauchy" && args.size() == 1) {
    prior = HalfCauchy{args[0]};
  } else {
    throw fail();
  }
  validate_prior(prior, family);
  return prior;
}

void validate_prior(const Prior& prior, std::string_view param) {
  const double scale = std::visit([](const auto& p) { return p.scale; }, prior);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("prior scale for '" + std::string(param) +
                      "' must be strictly positive, got " + format_double(scale));
  }
  if (const auto* n = std::get_if<Normal>(&prior); n && !std::isfinite(n->mean)) {
    throw ConfigError("prior mean for '" + std::string(param) + "' must be finite");
  }
}

// ---------------------------------------------------------------------------

LogisticPriors default_logistic_priors(const LogisticData& data) {
  const auto [tmin, tmax] = std::minmax_element(data.t.begin(), data.t.end());
  const double max_count =
      data.counts.empty() ? 1.0 : *std::max_element(data.counts.begin(), data.counts.end());
  const double range = data.t.empty() ? 1.0 : std::max(*tmax - *tmin, 1.0 / 7.0);
  const double mid = data.t.empty() ? 0.0 : 0.5 * (*tmin + *tmax);
  const double count_sd = std::max(sample_sd(data.counts), 1.0);
  return LogisticPriors{
      .alpha = HalfNormal{std::max(2.0 * max_count / kCaseScale, 1e-6)},
      .beta = HalfNormal{1.0},
      .t0 = Normal{mid, range},
      .sigma = HalfCauchy{count_sd},
  };
}

LogisticModel::LogisticModel(LogisticData data, LogisticPriors priors)
    : data_(std::move(data)), priors_(priors) {
  if (data_.t.size() != data_.counts.size()) {
    throw InputError("t-values (" + std::to_string(data_.t.size()) +
                     ") and counts (" + std::to_string(data_.counts.size()) +
                     ") differ in length");
  }
  if (data_.t.size() < 4) {
    throw InputError("logistic model needs at least 4 observations, got " +
                     std::to_string(data_.t.size()));
  }
  for (const double c : data_.counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InputError("case counts must be non-negative");
  }
  validate_prior(priors_.alpha, "alpha");
  validate_prior(priors_.beta, "beta");
  validate_prior(priors_.t0, "t0");
  validate_prior(priors_.sigma, "sigma");
  if (is_half(priors_.t0)) {
    throw ConfigError("t0 is unbounded and needs a normal prior, got " +
                      describe(priors_.t0));
  }
}

double logistic_log_likelihood(const LogisticParams& params, const LogisticData& data) {
  if (data.t.size() != data.counts.size()) {
    throw InputError("t-values (" + std::to_string(data.t.size()) + ") and counts (" +
                     std::to_string(data.counts.size()) + ") differ in length");
  }
  double acc = 0.0;
  const double log_sigma = std::log(params.sigma);
  const double inv_var = 1.0 / (params.sigma * params.sigma);
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    const double r = data.counts[i] - logistic_mean(params, data.t[i]);
    acc += -kHalfLog2Pi - log_sigma - 0.5 * r * r * inv_var;
  }
  return acc;
}

double LogisticModel::log_likelihood(const LogisticParams& params) const {
  return logistic_log_likelihood(params, data_);
}

double LogisticModel::log_prior(const LogisticParams& params) const {
  return prior_log_density(priors_.alpha, params.alpha) +
         prior_log_density(priors_.beta, params.beta) +
         prior_log_density(priors_.t0, params.t0) +
         prior_log_density(priors_.sigma, params.sigma);
}

double LogisticModel::log_posterior(std::span<const double> raw) const {
  if (raw.size() != kDim) {
    throw InputError("logistic model expects 4 raw parameters, got " +
                     std::to_string(raw.size()));
  }
  const LogisticParams params = to_params(raw);
  if (!params.valid()) return kNegInf;
  const double jacobian = raw[0] + raw[1] + raw[3];
  return log_likelihood(params) + log_prior(params) + jacobian;
}

double LogisticModel::log_posterior_gradient(std::span<const double> raw,
                                             std::span<double> grad) const {
  const double value = log_posterior(raw);
  const LogisticParams p = to_params(raw);
  const double amplitude = p.alpha * kCaseScale;
  const double inv_var = 1.0 / (p.sigma * p.sigma);

  double g_log_alpha = 0.0;
  double g_log_beta = 0.0;
  double g_t0 = 0.0;
  double g_log_sigma = 0.0;
  for (std::size_t i = 0; i < data_.t.size(); ++i) {
    const double dt = data_.t[i] - p.t0;
    const double x = p.beta * dt;
    const double mu = amplitude * sigmoid(x);
    const double slope = amplitude * sigmoid_slope(x);
    const double r = data_.counts[i] - mu;
    const double dmu = r * inv_var;
    g_log_alpha += dmu * mu;
    g_log_beta += dmu * slope * x;
    g_t0 -= dmu * slope * p.beta;
    g_log_sigma += -1.0 + r * r * inv_var;
  }
  grad[0] = g_log_alpha + log_scale_prior_derivative(priors_.alpha, p.alpha);
  grad[1] = g_log_beta + log_scale_prior_derivative(priors_.beta, p.beta);
  grad[2] = g_t0 + prior_log_density_derivative(priors_.t0, p.t0);
  grad[3] = g_log_sigma + log_scale_prior_derivative(priors_.sigma, p.sigma);
  return value;
}

LogisticParams LogisticModel::to_params(std::span<const double> raw) {
  return {std::exp(raw[0]), std::exp(raw[1]), raw[2], std::exp(raw[3])};
}

std::vector<double> LogisticModel::to_raw(const LogisticParams& params) {
  return {std::log(params.alpha), std::log(params.beta), params.t0,
          std::log(params.sigma)};
}

std::vector<std::string> LogisticModel::param_names() {
  return {"alpha", "beta", "t0", "sigma"};
}

LogisticParams LogisticModel::initial_guess() const {
  const double max_count = *std::max_element(data_.counts.begin(), data_.counts.end());
  LogisticParams guess;
  guess.alpha = std::max(max_count, 1.0) / kCaseScale;
  guess.t0 = data_.t.back();
  for (std::size_t i = 0; i < data_.t.size(); ++i) {
    if (data_.counts[i] >= 0.5 * max_count) {
      guess.t0 = data_.t[i];
      break;
    }
  }
  guess.beta = 1.0;
  guess.sigma = std::max(0.05 * sample_sd(data_.counts), 1.0);
  return guess;
}

double logistic_log_posterior(std::span<const double> raw, const LogisticData& data,
                              const LogisticPriors& priors) {
  if (data.t.size() != data.counts.size()) {
    throw InputError("t-values (" + std::to_string(data.t.size()) + ") and counts (" +
                     std::to_string(data.counts.size()) + ") differ in length");
  }
  return LogisticModel(data, priors).log_posterior(raw);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Likelihood likelihood) {
  return likelihood == Likelihood::student_t ? "student_t" : "normal";
}

Likelihood parse_likelihood(std::string_view name) {
  if (name == "normal") return Likelihood::normal;
  if (name == "student_t") return Likelihood::student_t;
  throw ConfigError("unknown likelihood '" + std::string(name) +
                    "' (expected normal or student_t)");
}

CrisisModel::CrisisModel(std::vector<double> returns, Eigen::MatrixXd indicators,
                         std::vector<std::string> weight_names, CrisisPriors priors,
                         Likelihood likelihood, std::optional<double> fixed_nu)
    : returns_(std::move(returns)),
      indicators_(std::move(indicators)),
      weight_names_(std::move(weight_names)),
      priors_(priors),
      likelihood_(likelihood),
      fixed_nu_(fixed_nu) {
  if (static_cast<std::size_t>(indicators_.rows()) != returns_.size()) {
    throw InputError("design has " + std::to_string(indicators_.rows()) +
                     " rows but there are " + std::to_string(returns_.size()) +
                     " returns");
  }
  if (weight_names_.size() != static_cast<std::size_t>(indicators_.cols())) {
    throw InputError("expected " + std::to_string(indicators_.cols()) +
                     " weight names, got " + std::to_string(weight_names_.size()));
  }
  validate_prior(priors_.intercept, "intercept");
  validate_prior(priors_.weight, "weight");
  validate_prior(priors_.sigma, "sigma");
  validate_prior(priors_.nu_minus_one, "nu");
  if (fixed_nu_ && !(*fixed_nu_ > 1.0)) {
    throw ConfigError("fixed nu must exceed 1");
  }
}

std::size_t CrisisModel::dim() const noexcept {
  return 2 + n_weights() + (estimates_nu() ? 1 : 0);
}

bool CrisisModel::estimates_nu() const noexcept {
  return likelihood_ == Likelihood::student_t && !fixed_nu_;
}

double CrisisModel::log_likelihood(const CrisisParams& params) const {
  const Eigen::Map<const Eigen::VectorXd> w(params.weights.data(),
                                            static_cast<Eigen::Index>(params.weights.size()));
  const Eigen::VectorXd eta = (indicators_ * w).array() + params.intercept;
  const double log_sigma = std::log(params.sigma);
  double acc = 0.0;
  if (likelihood_ == Likelihood::normal) {
    const double inv_var = 1.0 / (params.sigma * params.sigma);
    for (std::size_t i = 0; i < returns_.size(); ++i) {
      const double r = returns_[i] - eta[static_cast<Eigen::Index>(i)];
      acc += -kHalfLog2Pi - log_sigma - 0.5 * r * r * inv_var;
    }
    return acc;
  }
  const double nu = params.nu;
  const double norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                      0.5 * std::log(nu * std::numbers::pi) - log_sigma;
  for (std::size_t i = 0; i < returns_.size(); ++i) {
    const double z = (returns_[i] - eta[static_cast<Eigen::Index>(i)]) / params.sigma;
    acc += norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu);
  }
  return acc;
}

double CrisisModel::log_prior(const CrisisParams& params) const {
  double acc = prior_log_density(priors_.intercept, params.intercept) +
               prior_log_density(priors_.sigma, params.sigma);
  for (const double w : params.weights) acc += prior_log_density(priors_.weight, w);
  if (estimates_nu()) acc += prior_log_density(priors_.nu_minus_one, params.nu - 1.0);
  return acc;
}

double CrisisModel::log_posterior(std::span<const double> raw) const {
  if (raw.size() != dim()) {
    throw InputError("crisis model expects " + std::to_string(dim()) +
                     " raw parameters, got " + std::to_string(raw.size()));
  }
  const CrisisParams params = to_params(raw);
  if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) return kNegInf;
  double jacobian = raw[1 + n_weights()];
  if (estimates_nu()) {
    if (!(params.nu > 1.0) || !std::isfinite(params.nu)) return kNegInf;
    jacobian += raw[2 + n_weights()];
  }
  return log_likelihood(params) + log_prior(params) + jacobian;
}

double CrisisModel::log_posterior_gradient(std::span<const double> raw,
                                           std::span<double> grad) const {
  const double value = log_posterior(raw);
  const CrisisParams p = to_params(raw);
  const std::size_t k = n_weights();
  const Eigen::Map<const Eigen::VectorXd> w(p.weights.data(), static_cast<Eigen::Index>(k));
  const Eigen::VectorXd eta = (indicators_ * w).array() + p.intercept;

  Eigen::VectorXd d_eta(static_cast<Eigen::Index>(returns_.size()));
  double g_log_sigma = 0.0;
  double g_nu = 0.0;
  const double var = p.sigma * p.sigma;
  if (likelihood_ == Likelihood::normal) {
    for (std::size_t i = 0; i < returns_.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double r = returns_[i] - eta[row];
      d_eta[row] = r / var;
      g_log_sigma += -1.0 + r * r / var;
    }
  } else {
    const double nu = p.nu;
    const double dnorm = 0.5 * boost::math::digamma(0.5 * (nu + 1.0)) -
                         0.5 * boost::math::digamma(0.5 * nu) - 0.5 / nu;
    for (std::size_t i = 0; i < returns_.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double r = returns_[i] - eta[row];
      const double denom = nu * var + r * r;
      d_eta[row] = (nu + 1.0) * r / denom;
      g_log_sigma += -1.0 + (nu + 1.0) * r * r / denom;
      const double z = r * r / var;
      g_nu += dnorm - 0.5 * std::log1p(z / nu) + 0.5 * (nu + 1.0) * z / (nu * (nu + z));
    }
  }

  grad[0] = d_eta.sum() + prior_log_density_derivative(priors_.intercept, p.intercept);
  const Eigen::VectorXd g_w = indicators_.transpose() * d_eta;
  for (std::size_t j = 0; j < k; ++j) {
    grad[1 + j] = g_w[static_cast<Eigen::Index>(j)] +
                  prior_log_density_derivative(priors_.weight, p.weights[j]);
  }
  grad[1 + k] = g_log_sigma + log_scale_prior_derivative(priors_.sigma, p.sigma);
  if (estimates_nu()) {
    const double nu_minus_one = p.nu - 1.0;
    grad[2 + k] = nu_minus_one * g_nu +
                  log_scale_prior_derivative(priors_.nu_minus_one, nu_minus_one);
  }
  return value;
}

CrisisParams CrisisModel::to_params(std::span<const double> raw) const {
  const std::size_t k = n_weights();
  CrisisParams p;
  p.intercept = raw[0];
  p.weights.assign(raw.begin() + 1, raw.begin() + 1 + static_cast<std::ptrdiff_t>(k));
  p.sigma = std::exp(raw[1 + k]);
  if (estimates_nu()) {
    p.nu = 1.0 + std::exp(raw[2 + k]);
  } else if (fixed_nu_) {
    p.nu = *fixed_nu_;
  }
  return p;
}

std::vector<double> CrisisModel::to_raw(const CrisisParams& params) const {
  std::vector<double> raw{params.intercept};
  raw.insert(raw.end(), params.weights.begin(), params.weights.end());
  raw.push_back(std::log(params.sigma));
  if (estimates_nu()) raw.push_back(std::log(params.nu - 1.0));
  return raw;
}

std::vector<std::string> CrisisModel::param_names() const {
  std::vector<std::string> names{"intercept"};
  names.insert(names.end(), weight_names_.begin(), weight_names_.end());
  names.emplace_back("sigma");
  if (estimates_nu()) names.emplace_back("nu");
  return names;
}

double crisis_log_posterior(std::span<const double> raw, std::span<const double> returns,
                            const Eigen::MatrixXd& design, const CrisisPriors& priors,
                            Likelihood likelihood) {
  if (static_cast<std::size_t>(design.rows()) != returns.size()) {
    throw InputError("design has " + std::to_string(design.rows()) +
                     " rows but there are " + std::to_string(returns.size()) +
                     " returns");
  }
  if (design.cols() < 1) throw InputError("design needs an intercept column");
  const Eigen::Index k = design.cols() - 1;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < k; ++j) names.push_back("w" + std::to_string(j));
  const CrisisModel model(std::vector<double>(returns.begin(), returns.end()),
                          design.rightCols(k), std::move(names), priors, likelihood);
  return model.log_posterior(raw);
}

// ---------------------------------------------------------------------------

OlsResult ols_fit(const Eigen::MatrixXd& design, std::span<const double> y,
                  std::span<const std::string> column_names) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw InputError("design has " + std::to_string(n) + " rows but y has " +
                     std::to_string(y.size()) + " values");
  }
  if (p == 0) throw InputError("design has no columns");
  if (n < p) {
    throw InputError("design has fewer rows (" + std::to_string(n) + ") than columns (" +
                     std::to_string(p) + ")");
  }
  auto column_label = [&](Eigen::Index j) {
    const auto idx = static_cast<std::size_t>(j);
    std::string label = "column " + std::to_string(idx);
    if (idx < column_names.size()) label += " ('" + column_names[idx] + "')";
    return label;
  };

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd rhs = design.transpose() * yv;

  // Cholesky with a relative pivot test: the pivot over the original
  // diagonal is 1 - R^2 of column j regressed on the columns before it.
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double pivot = gram(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(gram(j, j) > 0.0) || !(pivot > 1e-10 * gram(j, j))) {
      throw SingularDesignError(static_cast<std::size_t>(j),
                                "singular design: " + column_label(j) +
                                    " is linearly dependent on earlier columns");
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < p; ++i) {
      double acc = gram(i, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= lower(i, k) * lower(j, k);
      lower(i, j) = acc / lower(j, j);
    }
  }
  const Eigen::MatrixXd upper = lower.transpose();
  auto solve = [&](const auto& b) -> Eigen::MatrixXd {
    const Eigen::MatrixXd half = lower.triangularView<Eigen::Lower>().solve(b);
    return upper.triangularView<Eigen::Upper>().solve(half);
  };
  Eigen::VectorXd beta = solve(rhs);
  beta += solve(Eigen::VectorXd(rhs - gram * beta));  // one step of iterative refinement

  const Eigen::VectorXd resid = yv - design * beta;
  OlsResult out;
  out.coefficients.assign(beta.data(), beta.data() + p);
  out.residual_sum_of_squares = resid.squaredNorm();
  if (n > p) {
    const double s2 = out.residual_sum_of_squares / static_cast<double>(n - p);
    const Eigen::MatrixXd inv = solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index j = 0; j < p; ++j) {
      out.standard_errors.push_back(std::sqrt(s2 * inv(j, j)));
    }
  }
  return out;
}

}  // namespace bayescast
