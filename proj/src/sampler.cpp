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

#include "bayescast/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "bayescast/csv.hpp"
#include "bayescast/errors.hpp"
#include "bayescast/rng.hpp"

namespace bayescast {

namespace {

constexpr std::size_t kAdaptWindow = 50;
constexpr double kScaleStep = 0.05;

struct ChainResult {
  std::vector<double> draws;
  ChainStats stats;
  std::vector<std::string> warnings;
};

bool accept_step(Rng& rng, double log_ratio) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform_open()) < log_ratio;
}

std::string stuck_message(std::size_t chain, std::size_t window_end) {
  return "chain " + std::to_string(chain) +
         ": every proposal rejected in warmup window ending at iteration " +
         std::to_string(window_end);
}

ChainResult run_metropolis(const LogDensity& log_density, std::vector<double> x,
                           const ChainConfig& config,
                           const Eigen::MatrixXd& chol, std::size_t chain) {
  const std::size_t dim = x.size();
  const double target = config.resolved_target_accept(dim);
  const bool adapt = !config.fixed_proposal_scale.has_value();
  std::vector<double> scale(dim, config.fixed_proposal_scale.value_or(
                                     config.initial_step_size));

  Rng rng = Rng::substream(config.seed, chain);
  ChainResult out;
  out.draws.reserve(config.n_draws * dim);

  double current = log_density(x);
  Eigen::VectorXd z(dim);
  std::vector<double> proposal(dim);
  std::size_t window_accepts = 0;
  std::size_t sampling_accepts = 0;
  const std::size_t total = config.n_warmup + config.n_draws;

  for (std::size_t iter = 0; iter < total; ++iter) {
    for (std::size_t d = 0; d < dim; ++d) z[d] = scale[d] * rng.normal();
    const Eigen::VectorXd step = chol.triangularView<Eigen::Lower>() * z;
    for (std::size_t d = 0; d < dim; ++d) proposal[d] = x[d] + step[d];

    const double candidate = log_density(proposal);
    const bool accepted =
        std::isfinite(candidate) && accept_step(rng, candidate - current);
    if (accepted) {
      x.swap(proposal);
      current = candidate;
    }

    if (iter < config.n_warmup) {
      window_accepts += accepted ? 1 : 0;
      if ((iter + 1) % kAdaptWindow == 0) {
        if (window_accepts == 0) {
          out.stats.stuck = true;
          out.warnings.push_back(stuck_message(chain, iter + 1));
        }
        if (adapt) {
          const double rate = static_cast<double>(window_accepts) / kAdaptWindow;
          const double factor =
              std::exp(rate > target ? kScaleStep : -kScaleStep);
          for (double& s : scale) s *= factor;
        }
        window_accepts = 0;
      }
    } else {
      sampling_accepts += accepted ? 1 : 0;
      out.draws.insert(out.draws.end(), x.begin(), x.end());
    }
  }
  out.stats.acceptance_rate =
      static_cast<double>(sampling_accepts) / static_cast<double>(config.n_draws);
  out.stats.step_size = dim > 0 ? scale.front() : 0.0;
  return out;
}

class DualAveraging {
 public:
  DualAveraging(double initial_step, double target)
      : mu_(std::log(10.0 * initial_step)), target_(target) {}

  /// Returns the step size to use for the next iteration.
  double update(double accept_prob) {
    ++m_;
    const double m = static_cast<double>(m_);
    const double w = 1.0 / (m + kT0);
    h_bar_ = (1.0 - w) * h_bar_ + w * (target_ - accept_prob);
    const double log_step = mu_ - std::sqrt(m) / kGamma * h_bar_;
    const double eta = std::pow(m, -kKappa);
    log_step_bar_ = eta * log_step + (1.0 - eta) * log_step_bar_;
    return std::exp(log_step);
  }

  [[nodiscard]] double final_step() const { return std::exp(log_step_bar_); }

 private:
  static constexpr double kGamma = 0.05;
  static constexpr double kT0 = 10.0;
  static constexpr double kKappa = 0.75;

  double mu_;
  double target_;
  double h_bar_ = 0.0;
  double log_step_bar_ = 0.0;
  std::size_t m_ = 0;
};

ChainResult run_hmc(const LogDensityGradient& value_and_grad,
                    std::vector<double> x, const ChainConfig& config,
                    const Eigen::MatrixXd& inv_metric,
                    const Eigen::MatrixXd& chol, std::size_t chain) {
  const std::size_t dim = x.size();
  const double target = config.resolved_target_accept(dim);
  Rng rng = Rng::substream(config.seed, chain);
  ChainResult out;
  out.draws.reserve(config.n_draws * dim);

  Eigen::VectorXd pos = Eigen::Map<const Eigen::VectorXd>(x.data(), dim);
  Eigen::VectorXd grad(dim);
  double current = value_and_grad(x, std::span<double>(grad.data(), dim));

  double step = config.initial_step_size;
  DualAveraging adaptation(step, target);
  std::size_t window_accepts = 0;
  std::size_t sampling_accepts = 0;
  const std::size_t total = config.n_warmup + config.n_draws;

  Eigen::VectorXd z(dim);
  Eigen::VectorXd q(dim);
  Eigen::VectorXd p(dim);
  Eigen::VectorXd g(dim);

  for (std::size_t iter = 0; iter < total; ++iter) {
    for (std::size_t d = 0; d < dim; ++d) z[d] = rng.normal();
    // p ~ N(0, M) with M^{-1} = L L^T, so p = L^{-T} z.
    p = chol.transpose().triangularView<Eigen::Upper>().solve(z);
    const double h0 = -current + 0.5 * p.dot(inv_metric * p);

    q = pos;
    g = grad;
    double log_p = current;
    p += 0.5 * step * g;
    for (std::size_t l = 0; l < config.hmc_leapfrog_steps; ++l) {
      q += step * (inv_metric * p);
      log_p = value_and_grad(std::span<const double>(q.data(), dim),
                             std::span<double>(g.data(), dim));
      if (!std::isfinite(log_p)) break;
      const double scale =
          (l + 1 == config.hmc_leapfrog_steps) ? 0.5 * step : step;
      p += scale * g;
    }
    const double h1 = -log_p + 0.5 * p.dot(inv_metric * p);
    const double log_ratio = h0 - h1;
    double accept_prob = 0.0;
    if (std::isfinite(log_ratio) && std::isfinite(log_p)) {
      accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
    }
    const bool accepted = accept_prob > 0.0 && accept_step(rng, log_ratio);
    if (accepted) {
      pos = q;
      grad = g;
      current = log_p;
    }

    if (iter < config.n_warmup) {
      step = adaptation.update(accept_prob);
      window_accepts += accepted ? 1 : 0;
      if ((iter + 1) % kAdaptWindow == 0) {
        if (window_accepts == 0) {
          out.stats.stuck = true;
          out.warnings.push_back(stuck_message(chain, iter + 1));
        }
        window_accepts = 0;
      }
      if (iter + 1 == config.n_warmup) step = adaptation.final_step();
    } else {
      sampling_accepts += accepted ? 1 : 0;
      out.draws.insert(out.draws.end(), pos.data(), pos.data() + dim);
    }
  }
  out.stats.acceptance_rate =
      static_cast<double>(sampling_accepts) / static_cast<double>(config.n_draws);
  out.stats.step_size = step;
  return out;
}

}  // namespace

std::string_view to_string(Kernel kernel) {
  return kernel == Kernel::hmc ? "hmc" : "metropolis";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "metropolis") return Kernel::metropolis;
  if (name == "hmc") return Kernel::hmc;
  throw ConfigError("unknown kernel '" + std::string(name) +
                    "' (expected metropolis or hmc)");
}

void ChainConfig::validate() const {
  if (n_chains < 1) throw ConfigError("n_chains must be at least 1");
  if (n_draws < 1) throw ConfigError("n_draws must be at least 1");
  if (target_accept && !(*target_accept > 0.0 && *target_accept < 1.0)) {
    throw ConfigError("target_accept must lie strictly inside (0, 1)");
  }
  if (kernel == Kernel::hmc && hmc_leapfrog_steps < 1) {
    throw ConfigError("hmc_leapfrog_steps must be positive");
  }
  if (!(initial_step_size > 0.0) || !std::isfinite(initial_step_size)) {
    throw ConfigError("initial_step_size must be a positive finite number");
  }
  if (fixed_proposal_scale &&
      !(*fixed_proposal_scale >= 0.0 && std::isfinite(*fixed_proposal_scale))) {
    throw ConfigError("fixed_proposal_scale must be non-negative and finite");
  }
}

double ChainConfig::resolved_target_accept(std::size_t dim) const {
  if (target_accept) return *target_accept;
  if (kernel == Kernel::hmc) return 0.8;
  return dim == 1 ? 0.44 : 0.234;
}

PosteriorSamples::PosteriorSamples(std::vector<std::string> param_names,
                                   std::size_t n_chains, std::size_t n_draws,
                                   std::vector<double> values)
    : names_(std::move(param_names)),
      n_chains_(n_chains),
      n_draws_(n_draws),
      values_(std::move(values)) {
  if (values_.size() != n_chains_ * n_draws_ * names_.size()) {
    throw InputError("draw array has " + std::to_string(values_.size()) +
                     " values, expected " + std::to_string(n_chains_) + " x " +
                     std::to_string(n_draws_) + " x " +
                     std::to_string(names_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("non-finite draw for parameter '" +
                       names_[i % names_.size()] + "'");
    }
  }
}

std::optional<std::size_t> PosteriorSamples::index_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t PosteriorSamples::require(std::string_view name) const {
  if (auto idx = index_of(name)) return *idx;
  throw InputError("posterior samples have no parameter '" + std::string(name) +
                   "'");
}

std::vector<double> PosteriorSamples::chain_values(std::size_t chain,
                                                   std::size_t param) const {
  std::vector<double> out(n_draws_);
  for (std::size_t d = 0; d < n_draws_; ++d) out[d] = at(chain, d, param);
  return out;
}

std::vector<double> PosteriorSamples::pooled(std::size_t param) const {
  std::vector<double> out;
  out.reserve(n_chains_ * n_draws_);
  for (std::size_t c = 0; c < n_chains_; ++c) {
    for (std::size_t d = 0; d < n_draws_; ++d) out.push_back(at(c, d, param));
  }
  return out;
}

PosteriorSamples PosteriorSamples::transform(
    std::vector<std::string> new_names,
    const std::function<void(std::span<const double>, std::span<double>)>& fn)
    const {
  const std::size_t width = new_names.size();
  std::vector<double> values(n_chains_ * n_draws_ * width);
  for (std::size_t c = 0; c < n_chains_; ++c) {
    for (std::size_t d = 0; d < n_draws_; ++d) {
      const std::size_t row = c * n_draws_ + d;
      fn(draw(c, d), std::span<double>(values.data() + row * width, width));
    }
  }
  PosteriorSamples out(std::move(new_names), n_chains_, n_draws_, std::move(values));
  out.chain_stats = chain_stats;
  out.warnings = warnings;
  out.config = config;
  return out;
}

double finite_difference_gradient(const LogDensity& log_density,
                                  std::span<const double> x,
                                  std::span<double> grad) {
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = log_density(probe);
    probe[i] = x[i] - h;
    const double down = log_density(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return log_density(x);
}

PosteriorSamples sample(const LogDensity& log_density, std::size_t dim,
                        std::span<const double> init, const ChainConfig& config,
                        const SampleOptions& options) {
  config.validate();
  if (dim == 0) throw InputError("dimension must be positive");

  std::vector<std::vector<double>> inits;
  if (!options.chain_inits.empty()) {
    if (options.chain_inits.size() != config.n_chains) {
      throw InputError("expected " + std::to_string(config.n_chains) +
                       " chain inits, got " +
                       std::to_string(options.chain_inits.size()));
    }
    inits = options.chain_inits;
  } else {
    inits.assign(config.n_chains, std::vector<double>(init.begin(), init.end()));
  }
  for (std::size_t c = 0; c < inits.size(); ++c) {
    if (inits[c].size() != dim) {
      throw InputError("init for chain " + std::to_string(c) + " has length " +
                       std::to_string(inits[c].size()) + ", expected " +
                       std::to_string(dim));
    }
    if (!std::isfinite(log_density(inits[c]))) {
      throw ConfigError("log density is not finite at the initial point of chain " +
                        std::to_string(c));
    }
  }

  std::vector<std::string> names = options.param_names;
  if (names.empty()) {
    for (std::size_t d = 0; d < dim; ++d) names.push_back("theta" + std::to_string(d));
  } else if (names.size() != dim) {
    throw InputError("param_names has " + std::to_string(names.size()) +
                     " entries, expected " + std::to_string(dim));
  }

  Eigen::MatrixXd cov = options.covariance.value_or(Eigen::MatrixXd::Identity(
      static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
  if (cov.rows() != static_cast<Eigen::Index>(dim) || cov.cols() != cov.rows()) {
    throw InputError("covariance must be " + std::to_string(dim) + " x " +
                     std::to_string(dim));
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("proposal covariance is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  LogDensityGradient value_and_grad = options.gradient;
  if (config.kernel == Kernel::hmc && !value_and_grad) {
    value_and_grad = [&log_density](std::span<const double> x,
                                    std::span<double> grad) {
      return finite_difference_gradient(log_density, x, grad);
    };
  }

  std::vector<ChainResult> results(config.n_chains);
  std::vector<std::exception_ptr> errors(config.n_chains);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t c = next++; c < config.n_chains; c = next++) {
      try {
        if (config.kernel == Kernel::metropolis) {
          results[c] = run_metropolis(log_density, inits[c], config, chol, c);
        } else {
          results[c] = run_hmc(value_and_grad, inits[c], config, cov, chol, c);
        }
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  std::size_t n_threads =
      config.threads > 0 ? config.threads
                         : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, config.n_chains);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }

  std::vector<double> values;
  values.reserve(config.n_chains * config.n_draws * dim);
  std::vector<ChainStats> stats;
  std::vector<std::string> warnings;
  for (auto& r : results) {
    values.insert(values.end(), r.draws.begin(), r.draws.end());
    stats.push_back(r.stats);
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  PosteriorSamples out(std::move(names), config.n_chains, config.n_draws,
                       std::move(values));
  out.chain_stats = std::move(stats);
  out.warnings = std::move(warnings);
  out.config = config;
  return out;
}

void write_draws_csv(std::ostream& out, const PosteriorSamples& samples) {
  out << "chain,draw";
  for (const auto& name : samples.param_names()) out << ',' << csv_field(name);
  out << '\n';
  for (std::size_t c = 0; c < samples.n_chains(); ++c) {
    for (std::size_t d = 0; d < samples.n_draws(); ++d) {
      out << c << ',' << d;
      for (const double v : samples.draw(c, d)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

PosteriorSamples read_draws_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("draw file is empty");
  auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "chain" || trim(header[1]) != "draw") {
    throw ParseError("draw file header must be 'chain,draw,<param...>'");
  }
  std::vector<std::string> names(header.begin() + 2, header.end());
  const std::size_t width = names.size();

  std::vector<std::vector<std::vector<double>>> chains;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != width + 2) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width + 2) + " fields, found " +
                       std::to_string(fields.size()));
    }
    const auto chain = parse_double(fields[0]);
    const auto draw = parse_double(fields[1]);
    if (!chain || !draw || *chain < 0 || *draw < 0 ||
        *chain != std::floor(*chain) || *draw != std::floor(*draw)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": chain and draw must be non-negative integers");
    }
    const auto c = static_cast<std::size_t>(*chain);
    const auto d = static_cast<std::size_t>(*draw);
    if (c > chains.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": chain " +
                       std::to_string(c) + " appears before chain " +
                       std::to_string(chains.size()));
    }
    if (c == chains.size()) chains.emplace_back();
    if (d != chains[c].size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected draw " +
                       std::to_string(chains[c].size()) + " of chain " +
                       std::to_string(c) + ", found " + std::to_string(d));
    }
    std::vector<double> row(width);
    for (std::size_t k = 0; k < width; ++k) {
      const auto v = parse_double(fields[k + 2]);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("line " + std::to_string(line_no) + ": bad value for '" +
                         names[k] + "'");
      }
      row[k] = *v;
    }
    chains[c].push_back(std::move(row));
    ++rows;
  }
  if (chains.empty()) throw ParseError("draw file has no rows");
  const std::size_t n_draws = chains.front().size();
  const std::size_t expected = chains.size() * n_draws;
  bool ragged = false;
  for (const auto& chain : chains) ragged |= chain.size() != n_draws;
  if (ragged || rows != expected) {
    std::string counts;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      counts += (c ? ", " : "") + std::to_string(chains[c].size());
    }
    throw ParseError("row count mismatch: expected " + std::to_string(expected) +
                     " rows (" + std::to_string(chains.size()) + " chains x " +
                     std::to_string(n_draws) + " draws), found " +
                     std::to_string(rows) + " (per chain: " + counts + ")");
  }
  std::vector<double> values;
  values.reserve(expected * width);
  for (const auto& chain : chains) {
    for (const auto& row : chain) values.insert(values.end(), row.begin(), row.end());
  }
  return PosteriorSamples(std::move(names), chains.size(), n_draws, std::move(values));
}

}  // namespace bayescast
