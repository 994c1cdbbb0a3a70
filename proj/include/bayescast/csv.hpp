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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bayescast {

/// Splits one CSV record. Handles double-quoted fields with "" escapes and
/// strips a trailing '\r'.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field if it contains a comma, quote or newline.
[[nodiscard]] std::string csv_field(std::string_view text);

/// Shortest decimal form that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Whole-field parse; nullopt on trailing garbage or empty input.
[[nodiscard]] std::optional<double> parse_double(std::string_view text);

[[nodiscard]] std::string_view trim(std::string_view text);

[[nodiscard]] std::string to_lower(std::string_view text);

}  // namespace bayescast
