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

#include <cstdint>
#include <optional>
#include <random>

namespace bayescast {

/// SplitMix64 finalizer. Used to hash stream indices into seeds.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The std distributions are not (their algorithms are
/// implementation-defined), so uniforms are built from the top 53 bits of
/// each word and normals from the Marsaglia polar method on top of those.
/// The only libm calls involved are std::log and std::sqrt.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream: engine seeded with seed XOR splitmix64(stream).
  [[nodiscard]] static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed ^ splitmix64(stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on (0, 1); safe to take the log of.
  double uniform_open();

  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace bayescast
