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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/envs.hpp"
#include "core/objectives.hpp"
#include "core/policy.hpp"

namespace proxlab {

/// Linear interpolation from start (first epoch) toward end (reached after the last epoch).
struct LinearAnneal {
  double start = 0.0;
  double end = 0.0;
  double at(std::size_t epoch, std::size_t n_epochs) const;
};

struct TrainConfig {
  ObjectiveConfig objective;
  std::optional<LinearAnneal> epsilon_anneal;
  std::optional<LinearAnneal> delta_anneal;
  std::string env = "balance";
  std::size_t total_timesteps = 102400;
  std::size_t timesteps_per_epoch = 1024;
  std::size_t minibatch_size = 64;
  std::size_t optimization_epochs = 10;
  double learning_rate = 3e-4;
  double gamma = 0.99;
  double lambda = 0.95;
  std::size_t n_envs = 2;
  std::uint64_t seed = 0;
  std::optional<double> entropy_coef;  // unset: 0.01 for discrete actions, 0 otherwise
  double value_loss_coef = 0.5;
  std::vector<std::size_t> hidden{64, 64};
  double init_log_std = 0.0;

  /// Throws invalid-argument on inconsistent or out-of-range settings.
  void validate() const;
  /// ceil(total_timesteps / timesteps_per_epoch)
  std::size_t epochs() const;
  /// Objective settings in force during the given epoch (after annealing).
  ObjectiveConfig objective_at(std::size_t epoch) const;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  std::size_t timesteps = 0;
  double mean_episode_reward = 0.0;
  double clipfrac = 0.0;
  double max_ratio = 1.0;
  double max_kl = 0.0;
  double mean_kl = 0.0;
  double entropy = 0.0;
  double unimproved_frac = 0.0;
  double loss = 0.0;
  double penalty_alpha = 0.0;  // live coefficient for PENALTY, 0 otherwise
};

/// Reusable buffers for minibatch_gradient.
struct MinibatchWorkspace;

/// Mean over `rows` of surrogate + entropy_coef * entropy - value_loss_coef *
/// (value - return)^2. Adds its gradient (ActorCritic flat order) into grad and
/// returns the value. The networks run as batched matrix products; only the
/// output heads are recorded on a tape.
double minibatch_gradient(const ActorCritic& model, const ObjectiveConfig& objective, const SampleBatch& batch,
                          std::span<const std::size_t> rows, double entropy_coef, double value_loss_coef,
                          double penalty_alpha, std::span<double> grad, MinibatchWorkspace* workspace = nullptr);

/// One epoch's worth of transitions. batch.advantage holds normalized values.
struct Collected {
  SampleBatch batch;
  std::vector<double> raw_advantage;
  std::vector<double> episode_returns;  // episodes that finished during collection
};

/// Stateful on-policy trainer; every random draw comes from one generator
/// seeded by config.seed.
class Trainer {
 public:
  explicit Trainer(TrainConfig config);
  ~Trainer();
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// Exactly timesteps_per_epoch transitions, split evenly over the environments.
  Collected collect_rollout();
  /// optimization_epochs shuffled minibatch passes, then end-of-epoch diagnostics.
  EpochMetrics train_epoch(const Collected& data);
  /// collect_rollout + train_epoch.
  EpochMetrics step();
  /// Steps until config.epochs() epochs have run; returns the full series.
  std::vector<EpochMetrics> run();

  bool finished() const { return epoch_ >= config_.epochs(); }
  std::size_t epoch() const { return epoch_; }
  const TrainConfig& config() const { return config_; }
  const ActorCritic& model() const { return model_; }
  ActorCritic& model() { return model_; }
  double entropy_coef() const { return entropy_coef_; }
  double penalty_alpha() const { return penalty_alpha_; }
  void set_penalty_alpha(double a) { penalty_alpha_ = a; }
  const std::vector<EpochMetrics>& history() const { return history_; }

 private:
  struct EnvSlot {
    std::unique_ptr<Environment> env;
    std::vector<double> obs;
    double episode_return = 0.0;
  };

  TrainConfig config_;
  Rng rng_;
  ActorCritic model_;
  Adam adam_;
  std::vector<EnvSlot> envs_;
  double entropy_coef_ = 0.0;
  double penalty_alpha_ = 0.0;
  double last_reward_ = 0.0;
  std::size_t epoch_ = 0;
  std::vector<EpochMetrics> history_;
};

std::vector<EpochMetrics> run(const TrainConfig& config);

}  // namespace proxlab
