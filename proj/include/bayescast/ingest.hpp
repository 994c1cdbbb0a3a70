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

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bayescast/dates.hpp"

namespace bayescast {

/// Loader output plus the non-fatal problems found while cleaning.
template <typename T>
struct Loaded {
  T series;
  std::vector<std::string> warnings;
};

/// Cumulative confirmed cases for one region. date0 is the first retained date.
struct CaseSeries {
  std::string region;
  Date date0;
  std::vector<Date> dates;
  std::vector<double> cumulative;

  friend bool operator==(const CaseSeries&, const CaseSeries&) = default;
};

struct PriceSeries {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> close;
};

/// Daily returns dated at the later of the two prices.
struct ReturnSeries {
  std::string ticker;
  std::vector<Date> dates;
  std::vector<double> returns;
};

enum class ReturnKind { simple, log };

[[nodiscard]] ReturnKind parse_return_kind(std::string_view name);

/// Both endpoints inclusive.
struct CrisisWindow {
  std::string name;
  Date start;
  Date end;

  [[nodiscard]] bool contains(Date d) const noexcept { return start <= d && d <= end; }
};

/// crisis_2008 [2008-01-01, 2009-01-31], down_turn_2018 [2018-10-01, 2019-01-03],
/// coronavirus [2020-02-18, 2020-03-25].
[[nodiscard]] std::vector<CrisisWindow> default_crisis_windows();

/// Design matrix: column 0 is the intercept, then one {0,1} column per window.
struct CrisisDesign {
  std::vector<Date> dates;
  std::vector<std::string> column_names;
  Eigen::MatrixXd matrix;

  [[nodiscard]] std::size_t n_windows() const noexcept {
    return column_names.empty() ? 0 : column_names.size() - 1;
  }
  /// Number of rows whose indicator for window k is 1.
  [[nodiscard]] std::size_t rows_in_window(std::size_t k) const;
};

/// Reads a JHU-style wide CSV (metadata columns, then one column per date)
/// and sums every row whose country (or, failing that, province) equals
/// `region`. Leading all-zero dates are dropped; decreases are clamped to the
/// running maximum with one warning per affected date.
[[nodiscard]] Loaded<CaseSeries> load_case_csv(std::istream& source,
                                               std::string_view region);

/// (days since date0) / 7 for each date. Throws InputError for dates before date0.
[[nodiscard]] std::vector<double> to_week_axis(std::span<const Date> dates, Date date0);

/// CSV with a header containing `date` and `close` (or `value`) columns.
/// Output is sorted and de-duplicated by date, the last row winning.
[[nodiscard]] Loaded<PriceSeries> load_price_csv(std::istream& source,
                                                 std::string ticker = "");

/// Throws InputError for fewer than two prices.
[[nodiscard]] ReturnSeries daily_returns(const PriceSeries& prices,
                                         ReturnKind kind = ReturnKind::simple);

/// Throws ConfigError naming the first overlapping pair of windows.
[[nodiscard]] CrisisDesign build_crisis_design(std::span<const Date> dates,
                                               std::span<const CrisisWindow> windows);

/// CSV with header `name,start,end`.
[[nodiscard]] std::vector<CrisisWindow> load_windows_csv(std::istream& source);

/// Long format: header `date,value`, ISO dates, shortest round-trip numbers.
void write_case_csv(std::ostream& out, const CaseSeries& series);
[[nodiscard]] CaseSeries read_case_long_csv(std::istream& source, std::string region);
void write_price_csv(std::ostream& out, const PriceSeries& series);

}  // namespace bayescast
