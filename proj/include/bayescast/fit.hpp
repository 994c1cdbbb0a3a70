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
#include <vector>

#include "bayescast/models.hpp"
#include "bayescast/optimize.hpp"
#include "bayescast/sampler.hpp"

namespace bayescast {

/// Sampler run on a model's unconstrained scale, with draws mapped back to
/// natural parameters.
struct ModelFit {
  PosteriorSamples raw;
  PosteriorSamples natural;
  LaplaceApproximation laplace;
};

/// Finds the posterior mode, uses the Laplace covariance as the proposal
/// shape (Metropolis) or inverse metric (HMC), and starts chain i at
/// mode + N(0, cov) drawn from its own substream. For Metropolis the
/// per-dimension scale starts at initial_step_size * 2.38 / sqrt(dim).
[[nodiscard]] ModelFit fit_logistic(const LogisticModel& model, const ChainConfig& config);

[[nodiscard]] ModelFit fit_crisis(const CrisisModel& model, const ChainConfig& config);

}  // namespace bayescast
