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

// Regenerates the synthetic fixtures under data/. The committed files are the
// output of `make_fixtures --out data`.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bayescast/csv.hpp"
#include "bayescast/ingest.hpp"
#include "bayescast/synthetic.hpp"

namespace fs = std::filesystem;
using namespace bayescast;

namespace {

Date iso(const char* text) { return *Date::parse_iso(text); }

std::string jhu_header(Date d) {
  const std::chrono::year_month_day ymd{d.sys_days()};
  return std::to_string(static_cast<unsigned>(ymd.month())) + "/" +
         std::to_string(static_cast<unsigned>(ymd.day())) + "/" +
         std::to_string(static_cast<int>(ymd.year()) % 100);
}

void write_cases(const fs::path& path) {
  LogisticParams truth;
  truth.alpha = 1.2;
  truth.beta = 0.8;
  truth.t0 = 6.0;
  truth.sigma = 200.0;
  const auto data = synthetic_logistic(truth, 60, 42);
  const Date date0 = iso("2020-03-01");
  std::ofstream out(path);
  out << "Province/State,Country/Region,Lat,Long";
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    out << ',' << jhu_header(date0.plus_days(static_cast<std::int64_t>(i)));
  }
  out << "\n,Synthland,0.0,0.0";
  for (const double n : data.counts) out << ',' << std::max(0LL, std::llround(n));
  out << '\n';
}

void write_prices(const fs::path& path, const ReturnSeries& returns) {
  const auto prices = prices_from_returns(returns, returns.dates.front().plus_days(-1));
  std::ofstream out(path);
  out << "date,close\n";
  for (std::size_t i = 0; i < prices.dates.size(); ++i) {
    out << prices.dates[i].iso() << ',' << format_double(prices.close[i]) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerate synthetic fixtures"};
  std::string out_dir = "data";
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out_dir);
  fs::create_directories(root / "prices");
  write_cases(root / "synthetic_cases.csv");

  const auto windows = default_crisis_windows();
  {
    std::ofstream out(root / "windows.csv");
    out << "name,start,end\n";
    for (const auto& w : windows) out << w.name << ',' << w.start.iso() << ',' << w.end.iso() << '\n';
  }

  // Single coronavirus-window effect, 300 trading days.
  write_prices(root / "prices" / "SYNC.csv",
               synthetic_returns(7, 300, iso("2019-06-03"), windows[2], -0.02, 0.01));

  // Long series covering all three windows.
  struct Fixture {
    const char* name;
    std::uint64_t seed;
    double shifts[3];
  };
  const Fixture multi[] = {{"SYNA", 101, {-0.006, 0.002, -0.015}},
                        {"SYNB", 102, {0.003, -0.004, 0.010}},
                        {"SYND", 103, {-0.001, -0.008, -0.004}}};
  for (const auto& f : multi) {
    write_prices(root / "prices" / (std::string(f.name) + ".csv"),
                 synthetic_returns(f.seed, 3400, iso("2007-06-01"), windows,
                                   std::span(f.shifts), 0.012));
  }

  // Trades only between windows.
  write_prices(root / "prices" / "OUTS.csv",
               synthetic_returns(11, 250, iso("2012-01-02"), windows[0], 0.0, 0.01));
  std::cout << "fixtures written to " << root.string() << '\n';
  return 0;
}
