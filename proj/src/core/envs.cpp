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
#include "core/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace proxlab {

namespace {

void check_distribution(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorCode::invalid_argument, std::string(what) + " has a bad entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::invalid_argument, std::string(what) + " does not sum to 1");
}

void dirichlet_one(std::span<double> out, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (double& x : out) {
    x = expo(rng);
    total += x;
  }
  for (double& x : out) x /= total;
}

}  // namespace

TabularMDP TabularMDP::zeros(std::size_t n_states, std::size_t n_actions, double gamma) {
  TabularMDP m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.transition.assign(n_states * n_actions * n_states, 0.0);
  m.reward.assign(n_states * n_actions, 0.0);
  m.initial.assign(n_states, 0.0);
  m.gamma = gamma;
  return m;
}

void TabularMDP::validate() const {
  if (n_states == 0 || n_actions == 0) fail(ErrorCode::invalid_argument, "MDP needs states and actions");
  if (transition.size() != n_states * n_actions * n_states || reward.size() != n_states * n_actions ||
      initial.size() != n_states) {
    fail(ErrorCode::invalid_argument, "MDP tensor sizes do not match n_states/n_actions");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorCode::invalid_argument, "MDP gamma must lie in (0, 1)");
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    check_distribution(std::span<const double>(transition).subspan(sa * n_states, n_states), "transition row");
  }
  check_distribution(initial, "initial distribution");
  for (double r : reward) {
    if (!std::isfinite(r)) fail(ErrorCode::invalid_argument, "non-finite reward");
  }
}

TabularMDP chain_mdp(std::size_t n) {
  if (n < 3) fail(ErrorCode::invalid_argument, "chain needs at least 3 states");
  constexpr std::size_t left = 0;
  constexpr std::size_t right = 1;
  auto m = TabularMDP::zeros(n, 2, 0.9);
  const std::size_t goal = n - 1;
  for (std::size_t s = 0; s < goal; ++s) {
    m.T(s, right, s + 1) = 0.9;
    m.T(s, right, s) = 0.1;
    m.T(s, left, s == 0 ? 0 : s - 1) = 1.0;
  }
  m.T(goal, left, 0) = 1.0;
  m.T(goal, right, 0) = 1.0;
  m.c(goal - 1, right) = 1.0;
  m.initial[0] = 1.0;
  m.validate();
  return m;
}

TabularMDP random_mdp(std::size_t n_states, std::size_t n_actions, Rng& rng, double gamma) {
  auto m = TabularMDP::zeros(n_states, n_actions, gamma);
  for (std::size_t sa = 0; sa < n_states * n_actions; ++sa) {
    dirichlet_one(std::span<double>(m.transition).subspan(sa * n_states, n_states), rng);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double& r : m.reward) r = unif(rng);
  dirichlet_one(m.initial, rng);
  return m;
}

PolicyTable random_policy_table(std::size_t n_states, std::size_t n_actions, Rng& rng) {
  PolicyTable pi(n_states, n_actions);
  std::vector<double> row(n_actions);
  for (std::size_t s = 0; s < n_states; ++s) {
    dirichlet_one(row, rng);
    for (std::size_t a = 0; a < n_actions; ++a) pi(s, a) = row[a];
  }
  return pi;
}

PolicyTable softmax_table(const Eigen::MatrixXd& logits) {
  PolicyTable pi(logits.rows(), logits.cols());
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const double m = logits.row(s).maxCoeff();
    double total = 0.0;
    for (Eigen::Index a = 0; a < logits.cols(); ++a) {
      pi(s, a) = std::exp(logits(s, a) - m);
      total += pi(s, a);
    }
    pi.row(s) /= total;
  }
  return pi;
}

std::vector<double> Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  steps_ = 0;
  obs_ = do_reset(rng_);
  active_ = true;
  return obs_;
}

StepResult Environment::step(const Action& action) {
  if (!active_) fail(ErrorCode::invalid_state, name() + ": step without an active episode");
  const ActionSpace space = action_space();
  if (space.discrete) {
    const auto* a = std::get_if<std::size_t>(&action);
    if (!a || *a >= space.n) fail(ErrorCode::invalid_argument, name() + ": invalid discrete action");
  } else {
    const auto* a = std::get_if<std::vector<double>>(&action);
    if (!a || a->size() != space.n) fail(ErrorCode::invalid_argument, name() + ": invalid continuous action");
  }
  StepResult r = do_step(action, rng_);
  ++steps_;
  if (steps_ >= horizon()) r.done = true;
  active_ = !r.done;
  obs_ = r.observation;
  return r;
}

void Environment::set_observation(std::vector<double> obs) {
  obs_ = std::move(obs);
  steps_ = 0;
  active_ = true;
}

// Cart-pole ------------------------------------------------------------------

namespace {
constexpr double kGravity = 9.8;
constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kTotalMass = kCartMass + kPoleMass;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kPoleMass * kHalfLength;
constexpr double kForce = 10.0;
constexpr double kTau = 0.02;
constexpr double kThetaLimit = 12.0 * 2.0 * std::numbers::pi / 360.0;
constexpr double kXLimit = 2.4;
}  // namespace

void BalanceEnv::reset_to(const std::array<double, 4>& state) {
  s_ = state;
  set_observation({s_.begin(), s_.end()});
}

std::vector<double> BalanceEnv::do_reset(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (double& x : s_) x = u(rng);
  return {s_.begin(), s_.end()};
}

StepResult BalanceEnv::do_step(const Action& action, Rng&) {
  const double force = std::get<std::size_t>(action) == 1 ? kForce : -kForce;
  auto& [x, x_dot, theta, theta_dot] = s_;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + kPoleMassLength * theta_dot * theta_dot * sin_t) / kTotalMass;
  const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                           (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;
  x += kTau * x_dot;
  x_dot += kTau * x_acc;
  theta += kTau * theta_dot;
  theta_dot += kTau * theta_acc;
  StepResult r;
  r.observation = {s_.begin(), s_.end()};
  r.reward = 1.0;
  r.done = std::abs(theta) > kThetaLimit || std::abs(x) > kXLimit;
  return r;
}

// Point mass -----------------------------------------------------------------

void PointMassEnv::reset_to(const std::array<double, 4>& state) {
  s_ = state;
  set_observation({s_.begin(), s_.end()});
}

std::vector<double> PointMassEnv::do_reset(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  s_ = {u(rng), u(rng), 0.0, 0.0};
  return {s_.begin(), s_.end()};
}

StepResult PointMassEnv::do_step(const Action& action, Rng&) {
  constexpr double dt = 0.1;
  const auto& raw = std::get<std::vector<double>>(action);
  const double ax = std::clamp(raw[0], -1.0, 1.0);
  const double ay = std::clamp(raw[1], -1.0, 1.0);
  s_[2] += dt * ax;
  s_[3] += dt * ay;
  s_[0] += dt * s_[2];
  s_[1] += dt * s_[3];
  StepResult r;
  r.observation = {s_.begin(), s_.end()};
  r.reward = -std::hypot(s_[0], s_[1]) - 0.01 * (ax * ax + ay * ay);
  return r;
}

// Tabular --------------------------------------------------------------------

TabularEnv::TabularEnv(TabularMDP mdp, std::string name, std::size_t horizon)
    : mdp_(std::move(mdp)), name_(std::move(name)), horizon_(horizon) {
  mdp_.validate();
  if (horizon_ == 0) fail(ErrorCode::invalid_argument, "horizon must be positive");
}

std::vector<double> TabularEnv::one_hot(std::size_t s) const {
  std::vector<double> o(mdp_.n_states, 0.0);
  o[s] = 1.0;
  return o;
}

std::vector<double> TabularEnv::do_reset(Rng& rng) {
  state_ = sample_index(mdp_.initial, rng);
  return one_hot(state_);
}

StepResult TabularEnv::do_step(const Action& action, Rng& rng) {
  const std::size_t a = std::get<std::size_t>(action);
  StepResult r;
  r.reward = mdp_.c(state_, a);
  const auto row = std::span<const double>(mdp_.transition).subspan((state_ * mdp_.n_actions + a) * mdp_.n_states,
                                                                    mdp_.n_states);
  state_ = sample_index(row, rng);
  r.observation = one_hot(state_);
  return r;
}

std::unique_ptr<Environment> make_env(const std::string& name) {
  if (name == "balance") return std::make_unique<BalanceEnv>();
  if (name == "pointmass") return std::make_unique<PointMassEnv>();
  if (name == "chain") return std::make_unique<TabularEnv>(chain_mdp(5), "chain");
  fail(ErrorCode::invalid_argument, "unknown environment '" + name + "'");
}

PolicyTable enumerate_tabular_policy(const Environment& env,
                                     const std::function<PolicyDist(std::span<const double>)>& policy) {
  const TabularMDP* mdp = env.tabular();
  if (!mdp) fail(ErrorCode::invalid_argument, env.name() + " is not a tabular environment");
  PolicyTable pi(mdp->n_states, mdp->n_actions);
  for (std::size_t s = 0; s < mdp->n_states; ++s) {
    std::vector<double> obs(mdp->n_states, 0.0);
    obs[s] = 1.0;
    const PolicyDist d = policy(obs);
    const auto* cat = std::get_if<CategoricalDist>(&d);
    if (!cat || cat->size() != mdp->n_actions) {
      fail(ErrorCode::invalid_argument, "tabular policy must be categorical over the MDP's actions");
    }
    const auto p = cat->probs();
    for (std::size_t a = 0; a < p.size(); ++a) pi(s, a) = p[a];
  }
  return pi;
}

}  // namespace proxlab
