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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bayescast/analytics.hpp"
#include "bayescast/cli.hpp"
#include "bayescast/diagnostics.hpp"
#include "bayescast/fit.hpp"
#include "bayescast/ingest.hpp"
#include "bayescast/models.hpp"
#include "bayescast/report.hpp"
#include "bayescast/rng.hpp"
#include "bayescast/sampler.hpp"
#include "bayescast/synthetic.hpp"

using namespace bayescast;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kMcseMultiple = 3.0;
constexpr double kConjugateSeconds = 10.0;
constexpr int kRecoveryReplications = 20;
constexpr int kRecoveryMinCovered = 15;
constexpr int kPeakDayTolerance = 3;
constexpr double kRecoverySeconds = 300.0;
constexpr int kPeakDraws = 1000;
constexpr double kPeakGridStep = 0.01;
constexpr double kCrisisShift = -0.02;
constexpr double kCrisisWeightTolerance = 0.005;
constexpr double kOlsPosteriorSds = 2.0;
constexpr double kCrisisSeconds = 60.0;
constexpr double kFatTailTolerance = 1e-3;
constexpr double kRhatThreshold = 1.05;
constexpr int kPropertyInstances = 100;
constexpr double kGradientRelTol = 1e-4;
constexpr double kOrthogonalityTol = 1e-8;

const std::string kData = BAYESCAST_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double pooled_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (const double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double pooled_variance(const std::vector<double>& xs) {
  const double m = pooled_mean(xs);
  double s = 0.0;
  for (const double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

// 1 -------------------------------------------------------------------------
Outcome conjugate_oracle() {
  const auto start = std::chrono::steady_clock::now();
  // y_i ~ N(mu, sd 2) with known sd, prior mu ~ N(0, 5).
  const double sd = 2.0;
  const double prior_sd = 5.0;
  Rng data_rng(2025);
  std::vector<double> y(25);
  for (auto& v : y) v = 3.0 + sd * data_rng.normal();
  double sum = 0.0;
  for (const double v : y) sum += v;
  const double precision = 1.0 / (prior_sd * prior_sd) + static_cast<double>(y.size()) / (sd * sd);
  const double post_var = 1.0 / precision;
  const double post_mean = post_var * sum / (sd * sd);

  auto log_density = [&](std::span<const double> x) {
    double lp = -0.5 * x[0] * x[0] / (prior_sd * prior_sd);
    for (const double v : y) lp -= 0.5 * (v - x[0]) * (v - x[0]) / (sd * sd);
    return lp;
  };
  ChainConfig config(1);
  const std::vector<double> init{0.0};
  const auto samples = sample(log_density, 1, init, config);

  const auto pooled = samples.pooled(0);
  const double m = pooled_mean(pooled);
  const double v = pooled_variance(pooled);
  const double mcse_m = mcse_mean(samples, 0);
  const auto squares = samples.transform({"sq"}, [m](std::span<const double> in, std::span<double> out) {
    out[0] = (in[0] - m) * (in[0] - m);
  });
  const double mcse_v = mcse_mean(squares, 0);
  const double secs = seconds_since(start);

  Outcome o;
  o.pass = std::abs(m - post_mean) < kMcseMultiple * mcse_m &&
           std::abs(v - post_var) < kMcseMultiple * mcse_v && secs < kConjugateSeconds;
  o.detail = "mean " + fmt(m, 6) + " vs " + fmt(post_mean, 6) + " (3 MCSE " +
             fmt(kMcseMultiple * mcse_m, 3) + "), var " + fmt(v, 5) + " vs " +
             fmt(post_var, 5) + " (3 MCSE " + fmt(kMcseMultiple * mcse_v, 3) + "), " +
             fmt(secs, 3) + " s";
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome logistic_recovery() {
  const auto start = std::chrono::steady_clock::now();
  LogisticParams truth;
  truth.alpha = 1.2;
  truth.beta = 0.8;
  truth.t0 = 6.0;
  truth.sigma = 200.0;
  const double true_values[] = {truth.alpha, truth.beta, truth.t0, truth.sigma};
  const char* names[] = {"alpha", "beta", "t0", "sigma"};
  const Date date0 = *Date::parse_iso("2020-03-01");
  const Date true_peak = date0.plus_days(42);

  int covered[4] = {0, 0, 0, 0};
  int peak_ok = 0;
  std::int64_t worst_peak_days = 0;
  for (int r = 0; r < kRecoveryReplications; ++r) {
    const auto data = synthetic_logistic(truth, 60, 42 + static_cast<std::uint64_t>(r));
    const LogisticModel model(data, default_logistic_priors(data));
    const auto fit = fit_logistic(model, ChainConfig(1000 + static_cast<std::uint64_t>(r)));
    for (std::size_t p = 0; p < 4; ++p) {
      const auto draws = fit.natural.pooled(p);
      const double lo = quantile(draws, 0.05);
      const double hi = quantile(draws, 0.95);
      if (lo <= true_values[p] && true_values[p] <= hi) ++covered[p];
    }
    const auto peak = estimate_peak(fit.natural, date0);
    const auto off = std::abs(days_between(true_peak, peak.median_date));
    worst_peak_days = std::max(worst_peak_days, off);
    if (off <= kPeakDayTolerance) ++peak_ok;
  }
  const double secs = seconds_since(start);

  Outcome o;
  o.pass = peak_ok == kRecoveryReplications && secs < kRecoverySeconds;
  o.detail = "90% coverage";
  for (std::size_t p = 0; p < 4; ++p) {
    o.pass = o.pass && covered[p] >= kRecoveryMinCovered;
    o.detail += std::string(p ? ", " : " ") + names[p] + " " + std::to_string(covered[p]) + "/" +
                std::to_string(kRecoveryReplications);
  }
  o.detail += "; median peak within 3 days in " + std::to_string(peak_ok) + "/" +
              std::to_string(kRecoveryReplications) + " (worst " +
              std::to_string(worst_peak_days) + " d); " + fmt(secs, 3) + " s";
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome peak_identity() {
  Rng rng(3);
  const Date date0 = *Date::parse_iso("2020-01-01");
  int violations = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < kPeakDraws; ++i) {
    LogisticParams p;
    p.alpha = std::exp(rng.normal());
    p.beta = 0.05 + 3.0 * rng.uniform();
    p.t0 = 20.0 * rng.uniform() - 2.0;
    p.sigma = 1.0;
    const PosteriorSamples one({"alpha", "beta", "t0", "sigma"}, 1, 1,
                               {p.alpha, p.beta, p.t0, p.sigma});
    const auto est = estimate_peak(one, date0);
    const double peak_t = est.median_weeks;
    const double peak_value = daily_new_cases(p, peak_t);

    // Absolute grid, not centred on t0.
    const double first = std::floor((p.t0 - 10.0) / kPeakGridStep) * kPeakGridStep;
    double best_t = first;
    double best = -1.0;
    for (int k = 0; first + kPeakGridStep * k <= p.t0 + 10.0; ++k) {
      const double t = first + kPeakGridStep * k;
      const double v = daily_new_cases(p, t);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    const double gap = std::abs(best_t - peak_t);
    worst_gap = std::max(worst_gap, gap);
    const bool height_ok =
        std::abs(est.peak_rate[2] - p.alpha * kCaseScale * p.beta / 4.0) <=
        1e-12 * est.peak_rate[2];
    if (best > peak_value || gap > 0.5 * kPeakGridStep + 1e-9 || !height_ok) ++violations;
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(violations) + " violations in " + std::to_string(kPeakDraws) +
             " draws (largest grid offset " + fmt(worst_gap, 3) + " weeks)";
  return o;
}

// 4 and 5 share the fixture -------------------------------------------------
struct CrisisFixture {
  ReturnSeries returns;
  Eigen::MatrixXd design;  // intercept, coronavirus

  CrisisFixture() {
    const auto windows = default_crisis_windows();
    const CrisisWindow& corona = windows[2];
    returns = synthetic_returns(7, 300, *Date::parse_iso("2019-06-03"), corona, kCrisisShift, 0.01);
    const std::vector<CrisisWindow> one{corona};
    design = build_crisis_design(returns.dates, one).matrix;
  }
};

Outcome crisis_recovery() {
  const auto start = std::chrono::steady_clock::now();
  const CrisisFixture fx;
  const CrisisModel model(fx.returns.returns, fx.design.rightCols(1), {"coronavirus"},
                          CrisisPriors{}, Likelihood::normal);
  const auto fit = fit_crisis(model, ChainConfig(4));
  const auto box = box_stats(fit.natural, "coronavirus");
  const auto ols = ols_fit(fx.design, fx.returns.returns);
  const double secs = seconds_since(start);

  Outcome o;
  const double median_err = std::abs(box.median - kCrisisShift);
  const double ols_gap = std::abs(ols.coefficients[1] - box.mean);
  o.pass = median_err <= kCrisisWeightTolerance && ols_gap <= kOlsPosteriorSds * box.std_dev &&
           secs < kCrisisSeconds;
  o.detail = "posterior median " + fmt(box.median) + " (|err| " + fmt(median_err, 3) +
             "), OLS " + fmt(ols.coefficients[1]) + " vs mean " + fmt(box.mean) + " (gap " +
             fmt(ols_gap / box.std_dev, 3) + " sd), " + fmt(secs, 3) + " s";
  return o;
}

Outcome fat_tail_limit() {
  const CrisisFixture fx;
  const CrisisModel t_model(fx.returns.returns, fx.design.rightCols(1), {"coronavirus"},
                            CrisisPriors{}, Likelihood::student_t, 1e6);
  // Compare where the posterior puts its mass: 100 draws from the normal fit.
  const CrisisModel normal_model(fx.returns.returns, fx.design.rightCols(1), {"coronavirus"},
                                 CrisisPriors{}, Likelihood::normal);
  const auto fit = fit_crisis(normal_model, ChainConfig(5));
  const std::size_t chains = fit.raw.n_chains();
  const std::size_t step = chains * fit.raw.n_draws() / 100;
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t flat = i * step;
    std::vector<double> raw(3);
    for (std::size_t p = 0; p < 3; ++p) raw[p] = fit.raw.at(flat % chains, flat / chains, p);
    const double normal = crisis_log_posterior(raw, fx.returns.returns, fx.design,
                                               CrisisPriors{}, Likelihood::normal);
    worst = std::max(worst, std::abs(t_model.log_posterior(raw) - normal));
  }
  Outcome o;
  o.pass = worst < kFatTailTolerance;
  o.detail = "max |t(nu=1e6) - normal| over 100 posterior draws = " + fmt(worst, 3);
  return o;
}

// 6 and 7 go through the command line ---------------------------------------
int run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  return run_cli(args, out, err);
}

std::vector<std::string> covid_args(const fs::path& dir) {
  return {"fit-covid", "--seed", "42", "--cases", kData + "/synthetic_cases.csv",
          "--region", "Synthland", "--out", dir.string()};
}

std::vector<std::string> crisis_args(const fs::path& dir) {
  std::vector<std::string> args{"fit-crisis", "--seed", "7", "--out", dir.string(), "--prices"};
  for (const auto& entry : fs::directory_iterator(kData + "/prices")) {
    args.push_back(entry.path().string());
  }
  std::sort(args.begin() + 6, args.end());
  return args;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bayescast_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

Outcome diagnostics_sanity() {
  Outcome o;
  const auto covid = scratch("covid");
  const auto crisis = scratch("crisis");
  const int covid_code = run(covid_args(covid));
  const int crisis_code = run(crisis_args(crisis));
  double worst = 0.0;
  int checked = 0;
  bool all_numbers = true;
  for (const auto& entry : fs::recursive_directory_iterator(scratch("none").parent_path())) {
    (void)entry;
    break;
  }
  for (const auto& root : {covid, crisis}) {
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.path().filename() != "diagnostics.json") continue;
      std::ifstream in(entry.path());
      const Json doc = Json::parse(in);
      for (const auto& p : doc["parameters"]) {
        ++checked;
        if (!p["rhat"].is_number()) {
          all_numbers = false;
          continue;
        }
        worst = std::max(worst, p["rhat"].get<double>());
      }
    }
  }

  // Constant chains.
  const PosteriorSamples flat({"a", "b"}, 2, 50, std::vector<double>(200, 0.1));
  const auto report = diagnose(flat);
  bool flagged = true;
  for (const auto& p : report.parameters) flagged = flagged && p.rhat.degenerate() && p.ess.degenerate();
  const Json as_json = to_json(report);
  for (const auto& p : as_json["parameters"]) {
    flagged = flagged && p["rhat"] == ChainStatistic::kDegenerateLabel &&
              p["ess"] == ChainStatistic::kDegenerateLabel;
  }

  o.pass = covid_code == kExitSuccess && crisis_code == kExitSuccess && all_numbers &&
           worst <= kRhatThreshold && checked > 0 && flagged;
  o.detail = "max R-hat " + fmt(worst, 4) + " over " + std::to_string(checked) +
             " fixture parameters (exit codes " + std::to_string(covid_code) + ", " +
             std::to_string(crisis_code) + "); constant chains " +
             (flagged ? "flagged degenerate" : "NOT flagged");
  return o;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome determinism() {
  int compared = 0;
  int different = 0;
  for (const bool covid : {true, false}) {
    const auto a = scratch(covid ? "det_covid_a" : "det_crisis_a");
    const auto b = scratch(covid ? "det_covid_b" : "det_crisis_b");
    run(covid ? covid_args(a) : crisis_args(a));
    run(covid ? covid_args(b) : crisis_args(b));
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      const auto ext = entry.path().extension();
      if (!entry.is_regular_file() || (ext != ".json" && ext != ".csv")) continue;
      ++compared;
      const auto other = b / fs::relative(entry.path(), a);
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++different;
    }
  }
  Outcome o;
  o.pass = compared > 0 && different == 0;
  o.detail = std::to_string(compared) + " JSON/CSV artifacts compared, " +
             std::to_string(different) + " differ";
  return o;
}

// 8 -------------------------------------------------------------------------
template <typename F>
std::vector<double> central_difference(F f, std::vector<double> x) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

bool gradient_agrees(const std::vector<double>& analytic, const std::vector<double>& fd) {
  double norm = 0.0;
  for (const double g : analytic) norm = std::max(norm, std::abs(g));
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    if (std::abs(fd[k] - analytic[k]) > kGradientRelTol * std::max(std::abs(analytic[k]), 1e-3 * norm)) {
      return false;
    }
  }
  return true;
}

Outcome algebraic_suite() {
  Rng rng(8);
  int midpoint = 0, monotone = 0, symmetric = 0, gradient = 0, orthogonal = 0;

  for (int i = 0; i < kPropertyInstances; ++i) {
    LogisticParams p;
    p.alpha = std::exp(2.0 * rng.normal());
    p.beta = std::exp(rng.normal());
    p.t0 = 20.0 * rng.normal();
    if (std::abs(logistic_mean(p, p.t0) - p.alpha * kCaseScale / 2.0) <=
        1e-12 * p.alpha * kCaseScale / 2.0) {
      ++midpoint;
    }
    const double a = p.t0 + 3.0 * rng.normal() / p.beta;
    const double b = a + (0.01 + rng.uniform()) / p.beta;
    if (logistic_mean(p, a) < logistic_mean(p, b)) ++monotone;
    const double d = (0.01 + 5.0 * rng.uniform()) / p.beta;
    const double up = daily_new_cases(p, p.t0 + d);
    const double down = daily_new_cases(p, p.t0 - d);
    if (std::abs(up - down) <= 1e-12 * std::max(up, down)) ++symmetric;
  }

  LogisticParams truth;
  truth.alpha = 1.2;
  truth.beta = 0.8;
  truth.t0 = 6.0;
  truth.sigma = 200.0;
  const auto data = synthetic_logistic(truth, 60, 42);
  const LogisticModel logistic(data, default_logistic_priors(data));
  const CrisisFixture fx;
  const CrisisModel crisis(fx.returns.returns, fx.design.rightCols(1), {"coronavirus"},
                           CrisisPriors{}, Likelihood::student_t);
  for (int i = 0; i < kPropertyInstances; ++i) {
    const std::vector<double> lraw{std::log(1.2) + 0.3 * rng.normal(),
                                   std::log(0.8) + 0.3 * rng.normal(), 6.0 + 2.0 * rng.normal(),
                                   std::log(200.0) + 0.5 * rng.normal()};
    std::vector<double> lgrad(4);
    (void)logistic.log_posterior_gradient(lraw, lgrad);
    const bool l_ok = gradient_agrees(
        lgrad, central_difference([&](const std::vector<double>& x) { return logistic.log_posterior(x); }, lraw));

    const std::vector<double> craw{0.002 * rng.normal(), -0.02 + 0.01 * rng.normal(),
                                   std::log(0.01) + 0.3 * rng.normal(), std::log(5.0) + rng.normal()};
    std::vector<double> cgrad(4);
    (void)crisis.log_posterior_gradient(craw, cgrad);
    const bool c_ok = gradient_agrees(
        cgrad, central_difference([&](const std::vector<double>& x) { return crisis.log_posterior(x); }, craw));
    if (l_ok && c_ok) ++gradient;
  }

  for (int i = 0; i < kPropertyInstances; ++i) {
    const int n = 5 + static_cast<int>(rng.next_u64() % 80);
    const int cols = 1 + static_cast<int>(rng.next_u64() % 4);
    Eigen::MatrixXd x(n, cols);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      x(r, 0) = 1.0;
      for (int c = 1; c < cols; ++c) x(r, c) = rng.uniform() < 0.3 ? 1.0 : rng.normal();
      y[static_cast<std::size_t>(r)] = 0.01 * rng.normal();
    }
    try {
      const auto fit = ols_fit(x, y);
      const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
      const Eigen::Map<const Eigen::VectorXd> beta(fit.coefficients.data(), cols);
      const Eigen::VectorXd resid = yv - x * beta;
      bool ok = true;
      for (int c = 0; c < cols; ++c) ok = ok && std::abs(x.col(c).dot(resid)) < kOrthogonalityTol * yv.norm();
      if (ok) ++orthogonal;
    } catch (const std::exception&) {
      // counted as a failure
    }
  }

  const int need = kPropertyInstances;
  Outcome o;
  o.pass = midpoint == need && monotone == need && symmetric == need && gradient == need &&
           orthogonal == need;
  auto frac = [&](int k) { return std::to_string(k) + "/" + std::to_string(need); };
  o.detail = "midpoint " + frac(midpoint) + ", monotone " + frac(monotone) + ", symmetry " +
             frac(symmetric) + ", gradients " + frac(gradient) + ", OLS orthogonality " +
             frac(orthogonal);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "conjugate oracle", conjugate_oracle},
      {2, "logistic recovery", logistic_recovery},
      {3, "peak identity", peak_identity},
      {4, "crisis-weight recovery", crisis_recovery},
      {5, "fat-tail limit", fat_tail_limit},
      {6, "diagnostics sanity", diagnostics_sanity},
      {7, "determinism", determinism},
      {8, "algebraic suite", algebraic_suite},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name
              << "): " << outcome.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria pass"
                              : std::to_string(failures) + " acceptance criteria fail")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
