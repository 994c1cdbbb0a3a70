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

#include <stdexcept>
#include <string>

namespace bayescast {

/// Bad arguments: dimension mismatches, missing parameters, unaligned data.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content. Carries the offending line or column in the message.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named entity (region, ticker, crisis) could not be found.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid settings: overlapping windows, non-finite starting density, bad priors.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularDesignError : public std::runtime_error {
 public:
  SingularDesignError(std::size_t column, const std::string& what)
      : std::runtime_error(what), column_(column) {}

  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace bayescast
