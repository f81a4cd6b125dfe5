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
#pragma once

#include <span>
#include <vector>

namespace proxlab {

/// One environment's trajectory segment. `done[t]` marks that step t ended an
/// episode; bootstrap_value is V of the state after the last step and is
/// ignored when the last step is terminal.
struct Rollout {
  std::vector<double> reward;
  std::vector<double> value_estimate;
  std::vector<bool> done;
  double bootstrap_value = 0.0;

  std::size_t size() const { return reward.size(); }
  void validate() const;
};

/// Backward GAE recursion; episode boundaries cut both the bootstrap and the trace.
std::vector<double> compute_gae(const Rollout& rollout, double gamma, double lambda);

/// returns_t = advantages_t + values_t
std::vector<double> compute_returns(std::span<const double> advantages, std::span<const double> values);

}  // namespace proxlab
