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

#include <cstddef>
#include <span>
#include <vector>

#include "core/autodiff.hpp"
#include "core/distributions.hpp"
#include "core/envs.hpp"
#include "core/mlp.hpp"
#include "core/tracked.hpp"

namespace proxlab {

/// Policy network, state-independent log_std (continuous actions only), and a
/// separate value network. Flat parameter order: policy, log_std, value.
struct ActorCritic {
  ActionSpace space;
  MlpParams policy;
  std::vector<double> log_std;
  MlpParams value_fn;

  static ActorCritic create(std::size_t obs_dim, ActionSpace space, std::span<const std::size_t> hidden,
                            double init_log_std, Rng& rng);

  std::size_t param_count() const;
  std::vector<double> flat() const;
  void set_flat(std::span<const double> params);

  PolicyDist dist(std::span<const double> obs) const;
  double value(std::span<const double> obs) const;
  /// Distribution from a raw policy-network output row.
  PolicyDist dist_from_output(std::span<const double> head) const;
};

/// Tape leaves for every parameter of an ActorCritic, in flat order.
struct TrackedActorCritic {
  std::vector<Var> policy;
  std::vector<Var> log_std;
  std::vector<Var> value_fn;
};

TrackedActorCritic track(Tape& tape, const ActorCritic& model);
DistVar policy_dist(Tape& tape, const ActorCritic& model, const TrackedActorCritic& leaves,
                    std::span<const double> obs);
Var value_estimate(Tape& tape, const ActorCritic& model, const TrackedActorCritic& leaves,
                   std::span<const double> obs);

/// Adaptive-moment optimizer with bias correction; ascend() moves along +grad.
class Adam {
 public:
  Adam(std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void ascend(std::span<double> params, std::span<const double> grad);
  double learning_rate() const { return lr_; }
  std::size_t steps() const { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double eps_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace proxlab
