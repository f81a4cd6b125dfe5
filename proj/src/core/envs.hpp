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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/distributions.hpp"

namespace proxlab {

/// Rows are states, columns actions; each row is a probability vector.
using PolicyTable = Eigen::MatrixXd;

/// Explicit finite MDP. Rewards are maximized.
struct TabularMDP {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> transition;  // [s][a][s'] flattened
  std::vector<double> reward;      // [s][a] flattened
  std::vector<double> initial;     // rho_1
  double gamma = 0.9;

  double T(std::size_t s, std::size_t a, std::size_t s2) const {
    return transition[(s * n_actions + a) * n_states + s2];
  }
  double& T(std::size_t s, std::size_t a, std::size_t s2) { return transition[(s * n_actions + a) * n_states + s2]; }
  double c(std::size_t s, std::size_t a) const { return reward[s * n_actions + a]; }
  double& c(std::size_t s, std::size_t a) { return reward[s * n_actions + a]; }

  static TabularMDP zeros(std::size_t n_states, std::size_t n_actions, double gamma);
  /// Throws invalid-argument on bad sizes, non-stochastic rows, or non-finite rewards.
  void validate() const;
};

/// n-state chain with actions {0: left, 1: right}. Right advances with
/// probability 0.9 and otherwise stays; left steps back (state 0 stays put).
/// The last state is the goal: any action there returns to state 0. The only
/// reward is 1 for pushing right from the state next to the goal.
TabularMDP chain_mdp(std::size_t n);

/// Dirichlet(1) transition rows and initial distribution, rewards U(0, 1).
TabularMDP random_mdp(std::size_t n_states, std::size_t n_actions, Rng& rng, double gamma = 0.9);

/// Dirichlet(1) rows.
PolicyTable random_policy_table(std::size_t n_states, std::size_t n_actions, Rng& rng);
/// Row-wise softmax of a logit table.
PolicyTable softmax_table(const Eigen::MatrixXd& logits);

struct ActionSpace {
  bool discrete = true;
  std::size_t n = 0;  // number of actions, or action dimension when continuous
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

/// Single-owner environment instance. reset() must precede step(); a step
/// after the episode ended is an invalid-state error. Episodes end either on a
/// terminal condition or when the horizon is reached.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::size_t observation_size() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual std::size_t horizon() const = 0;
  virtual const TabularMDP* tabular() const { return nullptr; }

  std::vector<double> reset(std::uint64_t seed);
  StepResult step(const Action& action);

  std::size_t step_count() const { return steps_; }
  bool episode_active() const { return active_; }
  const std::vector<double>& observation() const { return obs_; }

 protected:
  virtual std::vector<double> do_reset(Rng& rng) = 0;
  /// Advance one step; set done only for terminal conditions (the horizon is
  /// enforced by the base class).
  virtual StepResult do_step(const Action& action, Rng& rng) = 0;
  void set_observation(std::vector<double> obs);

 private:
  Rng rng_;
  std::vector<double> obs_;
  std::size_t steps_ = 0;
  bool active_ = false;
};

/// Cart-pole with Euler integration and the usual constants: pole half-length
/// 0.5, pole mass 0.1, cart mass 1.0, force 10, dt 0.02. Reward 1 per step.
/// Terminates when the pole leans past 12 degrees or the cart leaves [-2.4, 2.4].
class BalanceEnv final : public Environment {
 public:
  std::string name() const override { return "balance"; }
  std::size_t observation_size() const override { return 4; }
  ActionSpace action_space() const override { return {true, 2}; }
  std::size_t horizon() const override { return 500; }

  /// Start an episode from an explicit state (x, x_dot, theta, theta_dot).
  void reset_to(const std::array<double, 4>& state);

 protected:
  std::vector<double> do_reset(Rng& rng) override;
  StepResult do_step(const Action& action, Rng& rng) override;

 private:
  std::array<double, 4> s_{};
};

/// Planar point mass: state (px, py, vx, vy), action a force in [-1, 1]^2
/// (clipped), dt 0.1. Reward -|p| - 0.01 |a|^2 after the move. Horizon 200.
class PointMassEnv final : public Environment {
 public:
  std::string name() const override { return "pointmass"; }
  std::size_t observation_size() const override { return 4; }
  ActionSpace action_space() const override { return {false, 2}; }
  std::size_t horizon() const override { return 200; }

  void reset_to(const std::array<double, 4>& state);

 protected:
  std::vector<double> do_reset(Rng& rng) override;
  StepResult do_step(const Action& action, Rng& rng) override;

 private:
  std::array<double, 4> s_{};
};

/// Sampled episodes on a TabularMDP with one-hot observations.
class TabularEnv final : public Environment {
 public:
  TabularEnv(TabularMDP mdp, std::string name, std::size_t horizon = 50);

  std::string name() const override { return name_; }
  std::size_t observation_size() const override { return mdp_.n_states; }
  ActionSpace action_space() const override { return {true, mdp_.n_actions}; }
  std::size_t horizon() const override { return horizon_; }
  const TabularMDP* tabular() const override { return &mdp_; }
  std::size_t state() const { return state_; }

 protected:
  std::vector<double> do_reset(Rng& rng) override;
  StepResult do_step(const Action& action, Rng& rng) override;

 private:
  std::vector<double> one_hot(std::size_t s) const;

  TabularMDP mdp_;
  std::string name_;
  std::size_t horizon_;
  std::size_t state_ = 0;
};

/// "balance", "pointmass", or "chain" (5 states). Unknown names are invalid-argument.
std::unique_ptr<Environment> make_env(const std::string& name);

/// Per-state action probabilities of a categorical policy on a tabular
/// environment, queried at each one-hot observation.
PolicyTable enumerate_tabular_policy(const Environment& env,
                                     const std::function<PolicyDist(std::span<const double>)>& policy);

}  // namespace proxlab
