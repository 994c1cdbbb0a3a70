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

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bayescast {

/// Proleptic Gregorian calendar date.
class Date {
 public:
  constexpr Date() = default;
  explicit constexpr Date(std::chrono::sys_days days) : days_(days) {}

  /// nullopt when the fields do not form a real calendar date.
  [[nodiscard]] static std::optional<Date> from_ymd(int year, unsigned month,
                                                    unsigned day);

  /// YYYY-MM-DD
  [[nodiscard]] static std::optional<Date> parse_iso(std::string_view text);
  /// M/D/YY as used in JHU headers; the year is 2000 + YY.
  [[nodiscard]] static std::optional<Date> parse_jhu(std::string_view text);
  /// Either of the two forms above.
  [[nodiscard]] static std::optional<Date> parse(std::string_view text);

  [[nodiscard]] std::string iso() const;
  [[nodiscard]] std::chrono::sys_days sys_days() const noexcept { return days_; }
  [[nodiscard]] Date plus_days(std::int64_t n) const {
    return Date(days_ + std::chrono::days(n));
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

/// to - from, in days.
[[nodiscard]] std::int64_t days_between(Date from, Date to);

/// Throws ParseError("... '<text>'") when the text is not a supported date.
[[nodiscard]] Date parse_date_or_throw(std::string_view text, std::string_view context);

}  // namespace bayescast
