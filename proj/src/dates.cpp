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

#include "bayescast/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <vector>

#include "bayescast/csv.hpp"
#include "bayescast/errors.hpp"

namespace bayescast {

namespace {

std::optional<int> parse_digits(std::string_view text, std::size_t min_len,
                                std::size_t max_len) {
  if (text.size() < min_len || text.size() > max_len) return std::nullopt;
  int value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::optional<Date> Date::from_ymd(int year, unsigned month, unsigned day) {
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
  if (!ymd.ok()) return std::nullopt;
  return Date(std::chrono::sys_days{ymd});
}

std::optional<Date> Date::parse_iso(std::string_view text) {
  text = trim(text);
  const auto parts = split(text, '-');
  if (parts.size() != 3) return std::nullopt;
  const auto y = parse_digits(parts[0], 4, 4);
  const auto m = parse_digits(parts[1], 2, 2);
  const auto d = parse_digits(parts[2], 2, 2);
  if (!y || !m || !d) return std::nullopt;
  return from_ymd(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
}

std::optional<Date> Date::parse_jhu(std::string_view text) {
  text = trim(text);
  const auto parts = split(text, '/');
  if (parts.size() != 3) return std::nullopt;
  const auto m = parse_digits(parts[0], 1, 2);
  const auto d = parse_digits(parts[1], 1, 2);
  const auto y = parse_digits(parts[2], 2, 2);
  if (!y || !m || !d) return std::nullopt;
  return from_ymd(2000 + *y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
}

std::optional<Date> Date::parse(std::string_view text) {
  if (auto iso = parse_iso(text)) return iso;
  return parse_jhu(text);
}

std::string Date::iso() const {
  const std::chrono::year_month_day ymd{days_};
  std::array<char, 16> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf.data();
}

std::int64_t days_between(Date from, Date to) {
  return (to.sys_days() - from.sys_days()).count();
}

Date parse_date_or_throw(std::string_view text, std::string_view context) {
  if (auto date = Date::parse(text)) return *date;
  throw ParseError(std::string(context) + ": unparseable date '" + std::string(text) +
                   "' (expected YYYY-MM-DD or M/D/YY)");
}

}  // namespace bayescast
