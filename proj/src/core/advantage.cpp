// ----------------------------------------------------------------------------
// Copyright 2026 The ProxLab Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ----------------------------------------------------------------------------
#include "core/advantage.hpp"

#include <cmath>

#include "core/error.hpp"

namespace proxlab {

void Rollout::validate() const {
  if (value_estimate.size() != reward.size() || done.size() != reward.size()) {
    fail(ErrorCode::invalid_argument, "rollout fields have different lengths");
  }
  for (double v : value_estimate) {
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "non-finite value estimate in rollout");
  }
  if (!std::isfinite(bootstrap_value)) fail(ErrorCode::invalid_argument, "non-finite bootstrap value");
}

std::vector<double> compute_gae(const Rollout& rollout, double gamma, double lambda) {
  rollout.validate();
  if (!(gamma > 0.0 && gamma <= 1.0)) fail(ErrorCode::invalid_argument, "gamma must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_argument, "lambda must lie in [0, 1]");
  const std::size_t n = rollout.size();
  std::vector<double> adv(n);
  double next_value = rollout.bootstrap_value;
  double next_adv = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    const double live = rollout.done[k] ? 0.0 : 1.0;
    const double td = rollout.reward[k] + gamma * next_value * live - rollout.value_estimate[k];
    adv[k] = td + gamma * lambda * live * next_adv;
    next_value = rollout.value_estimate[k];
    next_adv = adv[k];
  }
  return adv;
}

std::vector<double> compute_returns(std::span<const double> advantages, std::span<const double> values) {
  if (advantages.size() != values.size()) fail(ErrorCode::invalid_argument, "advantages and values differ in length");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = advantages[i] + values[i];
  return out;
}

}  // namespace proxlab
