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

#include "bayescast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "bayescast/csv.hpp"
#include "bayescast/errors.hpp"

namespace bayescast {

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = above;
    }
  }
  return row[b.size()];
}

std::string near_matches(std::string_view wanted, const std::set<std::string>& names) {
  const std::string key = to_lower(wanted);
  std::vector<std::pair<std::size_t, std::string>> scored;
  for (const auto& name : names) {
    const std::string lower = to_lower(name);
    std::size_t score = edit_distance(key, lower);
    if (!key.empty() && (lower.find(key) != std::string::npos ||
                         key.find(lower) != std::string::npos)) {
      score = 0;
    }
    scored.emplace_back(score, name);
  }
  std::sort(scored.begin(), scored.end());
  std::string out;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, scored.size()); ++i) {
    out += (i ? ", " : "") + std::string("'") + scored[i].second + "'";
  }
  return out.empty() ? "(none)" : out;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       std::initializer_list<std::string_view> names) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = to_lower(trim(header[i]));
    for (const auto name : names) {
      if (h == name) return i;
    }
  }
  return std::nullopt;
}

}  // namespace

ReturnKind parse_return_kind(std::string_view name) {
  if (name == "simple") return ReturnKind::simple;
  if (name == "log") return ReturnKind::log;
  throw ConfigError("unknown return kind '" + std::string(name) +
                    "' (expected simple or log)");
}

std::vector<CrisisWindow> default_crisis_windows() {
  return {
      {"crisis_2008", *Date::from_ymd(2008, 1, 1), *Date::from_ymd(2009, 1, 31)},
      {"down_turn_2018", *Date::from_ymd(2018, 10, 1), *Date::from_ymd(2019, 1, 3)},
      {"coronavirus", *Date::from_ymd(2020, 2, 18), *Date::from_ymd(2020, 3, 25)},
  };
}

std::size_t CrisisDesign::rows_in_window(std::size_t k) const {
  const auto col = static_cast<Eigen::Index>(k + 1);
  return static_cast<std::size_t>((matrix.col(col).array() == 1.0).count());
}

Loaded<CaseSeries> load_case_csv(std::istream& source, std::string_view region) {
  std::string line;
  if (!std::getline(source, line)) throw ParseError("case CSV is empty");
  const auto header = split_csv_line(line);

  std::size_t first_date = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (Date::parse(header[i])) {
      first_date = i;
      break;
    }
  }
  if (first_date == header.size()) throw ParseError("case CSV header has no date columns");
  std::vector<Date> dates;
  for (std::size_t i = first_date; i < header.size(); ++i) {
    const auto date = Date::parse(header[i]);
    if (!date) {
      throw ParseError("case CSV header column " + std::to_string(i) +
                       ": malformed date '" + header[i] + "'");
    }
    if (!dates.empty() && *date <= dates.back()) {
      throw ParseError("case CSV header column " + std::to_string(i) + ": date " +
                       date->iso() + " is not after " + dates.back().iso());
    }
    dates.push_back(*date);
  }

  const auto country_col = find_column(header, {"country/region", "country_region"})
                               .value_or(first_date >= 2 ? 1 : 0);
  const auto province_col = find_column(header, {"province/state", "province_state"});

  std::vector<double> country_sum(dates.size(), 0.0);
  std::vector<double> province_sum(dates.size(), 0.0);
  bool country_hit = false;
  bool province_hit = false;
  std::set<std::string> known;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("case CSV line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    const std::string country(trim(fields[country_col]));
    const std::string province =
        province_col ? std::string(trim(fields[*province_col])) : std::string();
    known.insert(country);
    if (!province.empty()) known.insert(province);
    const bool in_country = country == region;
    const bool in_province = !in_country && province_col && province == region;
    if (!in_country && !in_province) continue;
    auto& sums = in_country ? country_sum : province_sum;
    (in_country ? country_hit : province_hit) = true;
    for (std::size_t i = 0; i < dates.size(); ++i) {
      const auto& cell = fields[first_date + i];
      if (trim(cell).empty()) continue;
      const auto value = parse_double(cell);
      if (!value || *value < 0.0) {
        throw ParseError("case CSV line " + std::to_string(line_no) + ", column " +
                         std::to_string(first_date + i) + ": bad count '" + cell + "'");
      }
      sums[i] += *value;
    }
  }
  if (!country_hit && !province_hit) {
    throw LookupError("region '" + std::string(region) +
                      "' not found; near matches: " + near_matches(region, known));
  }
  const auto& totals = country_hit ? country_sum : province_sum;

  const auto first_nonzero =
      std::find_if(totals.begin(), totals.end(), [](double v) { return v != 0.0; });
  if (first_nonzero == totals.end()) {
    throw InputError("region '" + std::string(region) + "' has no non-zero counts");
  }
  const auto start = static_cast<std::size_t>(first_nonzero - totals.begin());

  Loaded<CaseSeries> out;
  out.series.region = std::string(region);
  out.series.date0 = dates[start];
  double running_max = 0.0;
  for (std::size_t i = start; i < dates.size(); ++i) {
    double value = totals[i];
    if (value < running_max) {
      out.warnings.push_back(dates[i].iso() + ": cumulative count decreased from " +
                             format_double(running_max) + " to " + format_double(value) +
                             "; clamped to " + format_double(running_max));
      value = running_max;
    }
    running_max = value;
    out.series.dates.push_back(dates[i]);
    out.series.cumulative.push_back(value);
  }
  return out;
}

std::vector<double> to_week_axis(std::span<const Date> dates, Date date0) {
  std::vector<double> out;
  out.reserve(dates.size());
  for (const Date d : dates) {
    const auto days = days_between(date0, d);
    if (days < 0) {
      throw InputError("date " + d.iso() + " precedes date0 " + date0.iso());
    }
    out.push_back(static_cast<double>(days) / 7.0);
  }
  return out;
}

Loaded<PriceSeries> load_price_csv(std::istream& source, std::string ticker) {
  std::string line;
  if (!std::getline(source, line)) throw ParseError("price CSV is empty");
  const auto header = split_csv_line(line);
  const auto date_col = find_column(header, {"date"});
  const auto close_col = find_column(header, {"close", "value"});
  if (!date_col || !close_col) {
    throw ParseError("price CSV header must contain 'date' and 'close' columns");
  }

  Loaded<PriceSeries> out;
  std::map<Date, double> by_date;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "price CSV line " + std::to_string(line_no);
    if (fields.size() <= std::max(*date_col, *close_col)) {
      throw ParseError(where + ": too few fields");
    }
    const Date date = parse_date_or_throw(fields[*date_col], where);
    const auto close = parse_double(fields[*close_col]);
    if (!close || !std::isfinite(*close)) {
      throw ParseError(where + ": bad close value '" + fields[*close_col] + "'");
    }
    if (*close <= 0.0) {
      out.warnings.push_back(where + ": non-positive price " + format_double(*close) +
                             " rejected");
      continue;
    }
    auto [it, inserted] = by_date.insert_or_assign(date, *close);
    if (!inserted) {
      out.warnings.push_back(where + ": duplicate date " + date.iso() +
                             "; keeping the later row");
    }
  }
  out.series.ticker = std::move(ticker);
  for (const auto& [date, close] : by_date) {
    out.series.dates.push_back(date);
    out.series.close.push_back(close);
  }
  return out;
}

ReturnSeries daily_returns(const PriceSeries& prices, ReturnKind kind) {
  if (prices.close.size() < 2) {
    throw InputError("daily returns need at least 2 prices, got " +
                     std::to_string(prices.close.size()));
  }
  ReturnSeries out;
  out.ticker = prices.ticker;
  for (std::size_t i = 1; i < prices.close.size(); ++i) {
    const double prev = prices.close[i - 1];
    const double cur = prices.close[i];
    out.dates.push_back(prices.dates[i]);
    out.returns.push_back(kind == ReturnKind::simple ? (cur - prev) / prev
                                                     : std::log(cur / prev));
  }
  return out;
}

CrisisDesign build_crisis_design(std::span<const Date> dates,
                                 std::span<const CrisisWindow> windows) {
  for (std::size_t a = 0; a < windows.size(); ++a) {
    if (windows[a].end < windows[a].start) {
      throw ConfigError("crisis window '" + windows[a].name + "' ends before it starts");
    }
    for (std::size_t b = a + 1; b < windows.size(); ++b) {
      if (windows[a].start <= windows[b].end && windows[b].start <= windows[a].end) {
        throw ConfigError("crisis windows '" + windows[a].name + "' and '" +
                          windows[b].name + "' overlap");
      }
    }
  }
  CrisisDesign design;
  design.dates.assign(dates.begin(), dates.end());
  design.column_names.emplace_back("intercept");
  for (const auto& w : windows) design.column_names.push_back(w.name);
  const auto rows = static_cast<Eigen::Index>(dates.size());
  design.matrix = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(windows.size() + 1));
  design.matrix.col(0).setOnes();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < windows.size(); ++k) {
      if (windows[k].contains(dates[static_cast<std::size_t>(r)])) {
        design.matrix(r, static_cast<Eigen::Index>(k + 1)) = 1.0;
      }
    }
  }
  return design;
}

std::vector<CrisisWindow> load_windows_csv(std::istream& source) {
  std::string line;
  if (!std::getline(source, line)) throw ParseError("windows CSV is empty");
  const auto header = split_csv_line(line);
  const auto name_col = find_column(header, {"name"});
  const auto start_col = find_column(header, {"start"});
  const auto end_col = find_column(header, {"end"});
  if (!name_col || !start_col || !end_col) {
    throw ParseError("windows CSV header must be 'name,start,end'");
  }
  std::vector<CrisisWindow> windows;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "windows CSV line " + std::to_string(line_no);
    if (fields.size() < header.size()) throw ParseError(where + ": too few fields");
    CrisisWindow w{std::string(trim(fields[*name_col])),
                   parse_date_or_throw(fields[*start_col], where),
                   parse_date_or_throw(fields[*end_col], where)};
    if (w.name.empty()) throw ParseError(where + ": empty window name");
    if (w.end < w.start) {
      throw ConfigError(where + ": window '" + w.name + "' ends before it starts");
    }
    windows.push_back(std::move(w));
  }
  if (windows.empty()) throw ParseError("windows CSV has no rows");
  return windows;
}

void write_case_csv(std::ostream& out, const CaseSeries& series) {
  out << "date,value\n";
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    out << series.dates[i].iso() << ',' << format_double(series.cumulative[i]) << '\n';
  }
}

CaseSeries read_case_long_csv(std::istream& source, std::string region) {
  std::string line;
  if (!std::getline(source, line)) throw ParseError("case CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() != 2 || trim(header[0]) != "date" || trim(header[1]) != "value") {
    throw ParseError("long-format case CSV header must be 'date,value'");
  }
  CaseSeries series;
  series.region = std::move(region);
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "case CSV line " + std::to_string(line_no);
    if (fields.size() != 2) throw ParseError(where + ": expected 2 fields");
    const Date date = parse_date_or_throw(fields[0], where);
    const auto value = parse_double(fields[1]);
    if (!value) throw ParseError(where + ": bad value '" + fields[1] + "'");
    if (!series.dates.empty() && date <= series.dates.back()) {
      throw ParseError(where + ": dates must be strictly increasing");
    }
    series.dates.push_back(date);
    series.cumulative.push_back(*value);
  }
  if (series.dates.empty()) throw ParseError("case CSV has no rows");
  series.date0 = series.dates.front();
  return series;
}

void write_price_csv(std::ostream& out, const PriceSeries& series) {
  out << "date,value\n";
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    out << series.dates[i].iso() << ',' << format_double(series.close[i]) << '\n';
  }
}

}  // namespace bayescast
