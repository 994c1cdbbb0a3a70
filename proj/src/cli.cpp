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

#include "bayescast/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bayescast/analytics.hpp"
#include "bayescast/diagnostics.hpp"
#include "bayescast/errors.hpp"
#include "bayescast/fit.hpp"
#include "bayescast/ingest.hpp"
#include "bayescast/models.hpp"
#include "bayescast/report.hpp"
#include "bayescast/rng.hpp"

namespace bayescast {

namespace {

namespace fs = std::filesystem;

// Keeps the predictive-band noise stream apart from the sampler streams.
constexpr std::uint64_t kForecastSalt = 0xf0ec'a575'0000'0001ULL;

struct SharedOptions {
  std::uint64_t seed = 0;
  std::size_t chains = 4;
  std::size_t warmup = 1000;
  std::size_t draws = 1000;
  std::string kernel = "metropolis";
  double step_size = 1.0;
  std::size_t leapfrog_steps = 16;
  double target_accept = 0.0;  // 0: kernel default
  std::size_t threads = 0;
  std::string out = "out";
  std::vector<std::string> formats{"json", "csv", "svg"};

  [[nodiscard]] bool wants(std::string_view format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
  }

  [[nodiscard]] ChainConfig chain_config(std::uint64_t run_seed) const {
    ChainConfig config(run_seed);
    config.n_chains = chains;
    config.n_warmup = warmup;
    config.n_draws = draws;
    config.kernel = parse_kernel(kernel);
    config.initial_step_size = step_size;
    config.hmc_leapfrog_steps = leapfrog_steps;
    if (target_accept > 0.0) config.target_accept = target_accept;
    config.threads = threads;
    config.validate();
    return config;
  }
};

struct CovidOptions {
  std::string cases;
  std::string region;
  std::size_t horizon_days = 30;
  std::string band = "mean_curve";
  std::map<std::string, std::string> priors;
};

struct CrisisOptions {
  std::vector<std::string> prices;
  std::string windows;
  std::string likelihood = "normal";
  std::string returns = "simple";
  std::size_t top_k = 5;
  std::map<std::string, std::string> priors;
};

struct DiagnosticsOptions {
  std::string draws;
  std::string expect;
  std::string out;
};

void add_shared(CLI::App& sub, SharedOptions& o) {
  sub.fallthrough();
  sub.add_option("--seed", o.seed, "Random seed (required)")->required();
  sub.add_option("--chains", o.chains, "Number of chains")->capture_default_str();
  sub.add_option("--warmup", o.warmup, "Warmup iterations per chain")->capture_default_str();
  sub.add_option("--draws", o.draws, "Kept draws per chain")->capture_default_str();
  sub.add_option("--kernel", o.kernel, "Transition kernel")
      ->check(CLI::IsMember({"metropolis", "hmc"}))
      ->capture_default_str();
  sub.add_option("--step-size", o.step_size,
                 "Initial proposal scale (metropolis) or step size (hmc)")
      ->capture_default_str();
  sub.add_option("--leapfrog-steps", o.leapfrog_steps, "HMC leapfrog steps")
      ->capture_default_str();
  sub.add_option("--target-accept", o.target_accept,
                 "Adaptation target acceptance (default depends on kernel)");
  sub.add_option("--threads", o.threads, "Chain worker threads (0 = hardware)")
      ->capture_default_str();
  sub.add_option("--out", o.out, "Output directory")->capture_default_str();
  sub.add_option("--format", o.formats, "Artifact formats")
      ->delimiter(',')
      ->check(CLI::IsMember({"json", "csv", "svg"}))
      ->capture_default_str();
}

std::ifstream open_input(const std::string& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + std::string(what) + " '" + path + "'");
  return in;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

void write_json(const fs::path& path, const Json& doc) { write_file(path, doc.dump(2) + "\n"); }

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void emit_warning(std::ostream& err, const std::string& message) {
  err << Json{{"warning", message}}.dump() << '\n';
}

Json run_header(const SharedOptions& o) {
  Json j;
  j["seed"] = o.seed;
  j["chains"] = o.chains;
  j["warmup"] = o.warmup;
  j["draws"] = o.draws;
  j["kernel"] = o.kernel;
  return j;
}

Json diagnostics_document(const SharedOptions& o, const DiagnosticsReport& report) {
  Json doc = run_header(o);
  const Json body = to_json(report);
  for (const auto& [key, value] : body.items()) doc[key] = value;
  return doc;
}

std::string draws_text(const PosteriorSamples& samples) {
  std::ostringstream buf;
  write_draws_csv(buf, samples);
  return buf.str();
}

Prior override_prior(const std::map<std::string, std::string>& overrides,
                     const std::string& name, Prior fallback) {
  const auto it = overrides.find(name);
  return it == overrides.end() || it->second.empty() ? fallback : parse_prior(it->second);
}

// FNV-1a, so a ticker's seed does not depend on argument order.
std::uint64_t name_hash(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

int fit_covid(const SharedOptions& o, const CovidOptions& c, std::ostream& out,
              std::ostream& err) {
  auto file = open_input(c.cases, "cases file");
  const auto loaded = load_case_csv(file, c.region);
  for (const auto& w : loaded.warnings) emit_warning(err, c.region + ": " + w);
  const CaseSeries& series = loaded.series;

  LogisticData data;
  data.t = to_week_axis(series.dates, series.date0);
  data.counts = series.cumulative;
  if (data.t.size() < 4) {
    throw InputError("region '" + c.region + "' has " + std::to_string(data.t.size()) +
                     " observations after trimming; at least 4 are needed");
  }
  LogisticPriors priors = default_logistic_priors(data);
  priors.alpha = override_prior(c.priors, "alpha", priors.alpha);
  priors.beta = override_prior(c.priors, "beta", priors.beta);
  priors.t0 = override_prior(c.priors, "t0", priors.t0);
  priors.sigma = override_prior(c.priors, "sigma", priors.sigma);
  const LogisticModel model(data, priors);
  const BandKind band = parse_band_kind(c.band);
  const ChainConfig config = o.chain_config(o.seed);

  const fs::path dir(o.out);
  prepare_dir(dir);
  const ModelFit fit = fit_logistic(model, config);
  const PosteriorSamples& draws = fit.natural;
  const DiagnosticsReport report = diagnose(draws);
  for (const auto& w : report.warnings) emit_warning(err, w);

  std::vector<Date> horizon;
  const Date end = series.dates.back().plus_days(static_cast<std::int64_t>(c.horizon_days));
  for (Date d = series.date0; d <= end; d = d.plus_days(1)) horizon.push_back(d);
  const ForecastSummary summary =
      forecast(draws, series.date0, horizon, band, o.seed ^ kForecastSalt);
  const PeakEstimate peak = estimate_peak(draws, series.date0);

  if (o.wants("csv")) {
    write_file(dir / "draws.csv", draws_text(draws));
    std::ostringstream buf;
    write_forecast_csv(buf, summary);
    write_file(dir / "forecast.csv", buf.str());
  }
  if (o.wants("json")) {
    write_json(dir / "diagnostics.json", diagnostics_document(o, report));

    Json params;
    params["region"] = c.region;
    params["date0"] = series.date0.iso();
    Json prior_doc;
    prior_doc["alpha"] = describe(priors.alpha);
    prior_doc["beta"] = describe(priors.beta);
    prior_doc["t0"] = describe(priors.t0);
    prior_doc["sigma"] = describe(priors.sigma);
    params["priors"] = std::move(prior_doc);
    Json boxes;
    for (const auto& name : draws.param_names()) boxes[name] = to_json(box_stats(draws, name));
    params["parameters"] = std::move(boxes);
    write_json(dir / "params.json", params);

    Json fc = to_json(summary);
    Json doc;
    doc["region"] = c.region;
    doc["date0"] = series.date0.iso();
    Json observed = Json::array();
    for (std::size_t i = 0; i < series.dates.size(); ++i) {
      observed.push_back({{"date", series.dates[i].iso()}, {"value", series.cumulative[i]}});
    }
    doc["observed"] = std::move(observed);
    for (const auto& [key, value] : fc.items()) doc[key] = value;
    write_json(dir / "forecast.json", doc);

    Json peak_doc;
    peak_doc["region"] = c.region;
    peak_doc["date0"] = series.date0.iso();
    const Json body = to_json(peak);
    for (const auto& [key, value] : body.items()) peak_doc[key] = value;
    write_json(dir / "peak.json", peak_doc);
  }
  if (o.wants("svg")) {
    write_file(dir / "forecast.svg",
               forecast_svg(series, summary, c.region + ": cumulative cases"));
  }

  out << "region " << c.region << ": " << series.dates.size() << " observations from "
      << series.date0.iso() << '\n';
  out << "peak " << peak.median_date.iso() << " (5%: " << peak.lower_date.iso()
      << ", 95%: " << peak.upper_date.iso() << ")\n";
  out << "artifacts in " << dir.string() << '\n';
  if (!report.converged()) {
    emit_warning(err, "R-hat above 1.05 (or degenerate) for at least one parameter");
    return kExitNotConverged;
  }
  return kExitSuccess;
}

struct TickerResult {
  TickerWeights weights;
  bool converged = true;
};

int fit_crisis(const SharedOptions& o, const CrisisOptions& c, std::ostream& out,
               std::ostream& err) {
  std::vector<CrisisWindow> windows = default_crisis_windows();
  if (!c.windows.empty()) {
    auto file = open_input(c.windows, "windows file");
    windows = load_windows_csv(file);
  }
  const Likelihood likelihood = parse_likelihood(c.likelihood);
  const ReturnKind return_kind = parse_return_kind(c.returns);
  if (c.top_k == 0) throw ConfigError("--top-k must be positive");
  CrisisPriors priors;
  priors.intercept = override_prior(c.priors, "intercept", priors.intercept);
  priors.weight = override_prior(c.priors, "weight", priors.weight);
  priors.sigma = override_prior(c.priors, "sigma", priors.sigma);
  priors.nu_minus_one = override_prior(c.priors, "nu_minus_one", priors.nu_minus_one);
  (void)o.chain_config(o.seed);
  // Validates the windows before any fitting starts.
  (void)build_crisis_design(std::span<const Date>{}, windows);

  std::set<std::string> seen;
  std::vector<std::pair<std::string, std::string>> inputs;
  for (const auto& path : c.prices) {
    const std::string ticker = fs::path(path).stem().string();
    if (!seen.insert(ticker).second) {
      throw ConfigError("ticker '" + ticker + "' given twice (file names must differ)");
    }
    inputs.emplace_back(ticker, path);
  }
  std::sort(inputs.begin(), inputs.end());

  const fs::path dir(o.out);
  prepare_dir(dir);
  std::vector<TickerResult> results;
  for (const auto& [ticker, path] : inputs) {
    auto file = open_input(path, "price file");
    const auto loaded = load_price_csv(file, ticker);
    for (const auto& w : loaded.warnings) emit_warning(err, ticker + ": " + w);
    const ReturnSeries returns = daily_returns(loaded.series, return_kind);
    const CrisisDesign design = build_crisis_design(returns.dates, windows);

    std::vector<std::size_t> identified;
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const std::size_t inside = design.rows_in_window(k);
      if (inside == 0) {
        emit_warning(err, ticker + ": no trading days inside window '" + windows[k].name +
                              "'; weight unidentified");
      } else if (inside == returns.dates.size()) {
        emit_warning(err, ticker + ": every trading day is inside window '" +
                              windows[k].name + "'; weight unidentified");
      } else {
        identified.push_back(k);
      }
    }
    const auto n = static_cast<Eigen::Index>(returns.returns.size());
    Eigen::MatrixXd indicators(n, static_cast<Eigen::Index>(identified.size()));
    std::vector<std::string> names;
    std::vector<std::string> ols_names{"intercept"};
    for (std::size_t j = 0; j < identified.size(); ++j) {
      indicators.col(static_cast<Eigen::Index>(j)) =
          design.matrix.col(static_cast<Eigen::Index>(identified[j] + 1));
      names.push_back(windows[identified[j]].name);
      ols_names.push_back(windows[identified[j]].name);
    }
    Eigen::MatrixXd ols_design(n, indicators.cols() + 1);
    ols_design.col(0).setOnes();
    ols_design.rightCols(indicators.cols()) = indicators;
    const OlsResult ols = ols_fit(ols_design, returns.returns, ols_names);

    const CrisisModel model(returns.returns, indicators, names, priors, likelihood);
    const ModelFit fit =
        fit_crisis(model, o.chain_config(o.seed ^ name_hash(ticker)));
    const PosteriorSamples& draws = fit.natural;
    const DiagnosticsReport report = diagnose(draws);
    for (const auto& w : report.warnings) emit_warning(err, ticker + ": " + w);

    TickerResult result;
    result.weights.ticker = ticker;
    result.converged = report.converged();
    for (const auto& w : windows) result.weights.weights[w.name] = std::nullopt;
    for (const auto& name : names) result.weights.weights[name] = box_stats(draws, name);

    const fs::path tdir = dir / ticker;
    prepare_dir(tdir);
    if (o.wants("csv")) write_file(tdir / "draws.csv", draws_text(draws));
    if (o.wants("json")) {
      Json diag = diagnostics_document(o, report);
      diag["ticker"] = ticker;
      write_json(tdir / "diagnostics.json", diag);

      Json wdoc;
      wdoc["ticker"] = ticker;
      wdoc["likelihood"] = std::string(to_string(likelihood));
      wdoc["returns"] = c.returns;
      wdoc["n_obs"] = returns.returns.size();
      Json wmap;
      for (const auto& w : windows) {
        const auto& box = result.weights.weights[w.name];
        wmap[w.name] = box ? to_json(*box) : Json(kUnidentified);
      }
      wdoc["weights"] = std::move(wmap);
      Json other;
      for (const auto& name : draws.param_names()) {
        if (std::find(names.begin(), names.end(), name) == names.end()) {
          other[name] = to_json(box_stats(draws, name));
        }
      }
      wdoc["nuisance"] = std::move(other);
      write_json(tdir / "weights.json", wdoc);

      Json odoc;
      odoc["ticker"] = ticker;
      odoc["n_obs"] = returns.returns.size();
      odoc["residual_sum_of_squares"] = ols.residual_sum_of_squares;
      Json coef;
      Json se;
      coef["intercept"] = ols.coefficients[0];
      if (!ols.standard_errors.empty()) se["intercept"] = ols.standard_errors[0];
      for (const auto& w : windows) {
        const auto it = std::find(names.begin(), names.end(), w.name);
        if (it == names.end()) {
          coef[w.name] = kUnidentified;
          se[w.name] = kUnidentified;
          continue;
        }
        const auto j = static_cast<std::size_t>(it - names.begin()) + 1;
        coef[w.name] = ols.coefficients[j];
        if (!ols.standard_errors.empty()) se[w.name] = ols.standard_errors[j];
      }
      odoc["coefficients"] = std::move(coef);
      odoc["standard_errors"] = std::move(se);
      write_json(tdir / "ols.json", odoc);
    }
    out << ticker << ": " << returns.returns.size() << " returns, " << identified.size()
        << " of " << windows.size() << " windows identified\n";
    results.push_back(std::move(result));
  }

  std::vector<TickerWeights> summaries;
  for (const auto& r : results) summaries.push_back(r.weights);
  if (o.wants("json")) {
    Json rankings;
    rankings["top_k"] = c.top_k;
    Json crises;
    for (const auto& w : windows) {
      Json entry;
      for (const auto dir_kind : {RankDirection::most_negative, RankDirection::most_positive}) {
        Json list = Json::array();
        for (const auto& r : rank_tickers(summaries, w.name, dir_kind, c.top_k)) {
          list.push_back({{"ticker", r.ticker}, {"median", r.median}});
        }
        entry[dir_kind == RankDirection::most_negative ? "most_negative" : "most_positive"] =
            std::move(list);
      }
      crises[w.name] = std::move(entry);
    }
    rankings["crises"] = std::move(crises);
    write_json(dir / "rankings.json", rankings);
  }
  if (o.wants("svg")) {
    std::vector<BoxGroup> groups;
    for (const auto& w : windows) {
      BoxGroup g{w.name, {}};
      for (const auto& s : summaries) g.boxes.emplace_back(s.ticker, s.weights.at(w.name));
      groups.push_back(std::move(g));
    }
    write_file(dir / "weights.svg", box_plot_svg(groups, "Posterior crisis weights"));
  }
  out << "artifacts in " << dir.string() << '\n';
  const bool all_converged =
      std::all_of(results.begin(), results.end(), [](const auto& r) { return r.converged; });
  if (!all_converged) {
    emit_warning(err, "R-hat above 1.05 (or degenerate) for at least one ticker");
    return kExitNotConverged;
  }
  return kExitSuccess;
}

bool same_statistic(const ChainStatistic& a, const ChainStatistic& b) {
  if (a.degenerate() || b.degenerate()) return a.degenerate() == b.degenerate();
  return std::abs(a.value() - b.value()) <= 1e-10 * std::max(1.0, std::abs(b.value()));
}

int diagnostics(const DiagnosticsOptions& d, std::ostream& out, std::ostream& err) {
  auto file = open_input(d.draws, "draws file");
  const PosteriorSamples samples = read_draws_csv(file);
  const DiagnosticsReport report = diagnose(samples);
  const Json doc = to_json(report);

  std::string expect = d.expect;
  if (expect.empty()) {
    const fs::path sibling = fs::path(d.draws).parent_path() / "diagnostics.json";
    if (fs::exists(sibling)) expect = sibling.string();
  }
  Json result = doc;
  if (!expect.empty()) {
    auto stored_file = open_input(expect, "diagnostics file");
    Json stored;
    try {
      stored = Json::parse(stored_file);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("diagnostics file '" + expect + "' is not valid JSON");
    }
    const auto stored_params = diagnostics_from_json(stored);
    if (stored_params.size() != report.parameters.size()) {
      throw ParseError("diagnostics mismatch: stored file has " +
                       std::to_string(stored_params.size()) + " parameters, draws have " +
                       std::to_string(report.parameters.size()));
    }
    for (std::size_t i = 0; i < stored_params.size(); ++i) {
      const auto& a = report.parameters[i];
      const auto& b = stored_params[i];
      if (a.name != b.name || !same_statistic(a.rhat, b.rhat) || !same_statistic(a.ess, b.ess)) {
        throw ParseError("diagnostics mismatch for parameter '" + a.name + "'");
      }
    }
    result["matches"] = expect;
  }
  if (!d.out.empty()) {
    prepare_dir(d.out);
    write_json(fs::path(d.out) / "diagnostics.json", doc);
  }
  out << result.dump(2) << '\n';
  if (!report.converged()) {
    emit_warning(err, "R-hat above 1.05 (or degenerate) for at least one parameter");
    return kExitNotConverged;
  }
  return kExitSuccess;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const LookupError*>(&e)) return "lookup";
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const InputError*>(&e)) return "input";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const SingularDesignError*>(&e)) return "singular_design";
  return "runtime";
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian logistic-growth forecasts and crisis-weight regressions"};
  app.name("bayescast");
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; flags take precedence");

  SharedOptions covid_shared;
  CovidOptions covid;
  auto* covid_cmd = app.add_subcommand("fit-covid", "Fit the logistic growth model to case counts");
  add_shared(*covid_cmd, covid_shared);
  covid_cmd->add_option("--cases", covid.cases, "JHU-style wide case CSV")->required();
  covid_cmd->add_option("--region", covid.region, "Country (or province) name")->required();
  covid_cmd->add_option("--horizon-days", covid.horizon_days,
                        "Forecast days past the last observation")
      ->capture_default_str();
  covid_cmd->add_option("--band", covid.band, "Forecast band kind")
      ->check(CLI::IsMember({"mean_curve", "predictive"}))
      ->capture_default_str();
  for (const char* p : {"alpha", "beta", "t0", "sigma"}) {
    covid_cmd->add_option(std::string("--prior-") + p, covid.priors[p],
                          "Prior override, e.g. half_normal(1)");
  }

  SharedOptions crisis_shared;
  CrisisOptions crisis;
  auto* crisis_cmd =
      app.add_subcommand("fit-crisis", "Fit crisis-indicator return regressions per ticker");
  add_shared(*crisis_cmd, crisis_shared);
  crisis_cmd->add_option("--prices", crisis.prices, "Price CSVs (date, close); ticker = file stem")
      ->required();
  crisis_cmd->add_option("--windows", crisis.windows, "Crisis windows CSV (name,start,end)");
  crisis_cmd->add_option("--likelihood", crisis.likelihood, "Residual distribution")
      ->check(CLI::IsMember({"normal", "student_t"}))
      ->capture_default_str();
  crisis_cmd->add_option("--returns", crisis.returns, "Return definition")
      ->check(CLI::IsMember({"simple", "log"}))
      ->capture_default_str();
  crisis_cmd->add_option("--top-k", crisis.top_k, "Tickers per ranking list")
      ->capture_default_str();
  for (const char* p : {"intercept", "weight", "sigma", "nu_minus_one"}) {
    std::string flag = std::string("--prior-") + p;
    std::replace(flag.begin(), flag.end(), '_', '-');
    crisis_cmd->add_option(flag, crisis.priors[p], "Prior override, e.g. normal(0, 0.05)");
  }

  DiagnosticsOptions diag;
  auto* diag_cmd =
      app.add_subcommand("diagnostics", "Recompute R-hat and ESS from a draws CSV");
  diag_cmd->fallthrough();
  diag_cmd->add_option("--draws", diag.draws, "draws.csv written by a fit")->required();
  diag_cmd->add_option("--expect", diag.expect,
                       "Stored diagnostics JSON to verify (default: diagnostics.json "
                       "next to the draws)");
  diag_cmd->add_option("--out", diag.out, "Directory for the recomputed diagnostics.json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what());
    return kExitError;
  }

  try {
    if (*covid_cmd) return fit_covid(covid_shared, covid, out, err);
    if (*crisis_cmd) return fit_crisis(crisis_shared, crisis, out, err);
    return diagnostics(diag, out, err);
  } catch (const std::exception& e) {
    emit_error(err, error_kind(e), e.what());
    return kExitError;
  }
}

}  // namespace bayescast
