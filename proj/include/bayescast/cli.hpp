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
#include <string>
#include <vector>

namespace bayescast {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
/// Artifacts were written but some R-hat exceeds 1.05 (or is degenerate).
inline constexpr int kExitNotConverged = 2;

/// Runs one command line (without the program name). Progress goes to `out`;
/// warnings and the single-line JSON error go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bayescast
