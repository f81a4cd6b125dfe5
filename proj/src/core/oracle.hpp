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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/autodiff.hpp"
#include "core/distributions.hpp"
#include "core/envs.hpp"

namespace proxlab {

/// Exact quantities of a fixed policy. rho is the normalized discounted state
/// occupancy (1-gamma) sum_t gamma^(t-1) P(s_t = s); eta = sum_s rho(s) sum_a pi c.
struct ExactEval {
  Eigen::VectorXd V;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd A;
  Eigen::VectorXd rho;
  double eta = 0.0;
};

/// Throws invalid-argument unless pi is row-stochastic with the MDP's shape.
void validate_policy(const TabularMDP& mdp, const PolicyTable& pi);

ExactEval exact_eval(const TabularMDP& mdp, const PolicyTable& pi);

/// max_s |V(s) - sum_a pi(a|s) (c(s,a) + gamma sum_s' T V(s'))|
double bellman_residual(const TabularMDP& mdp, const PolicyTable& pi, const ExactEval& ev);

/// eta_old + sum_s rho_old(s) sum_a pi(a|s) A_old(s,a)
double surrogate_lpg(const ExactEval& old_eval, const PolicyTable& pi);

/// max over all states of KL(old(.|s) || pi(.|s)).
double max_state_kl(const PolicyTable& old_pi, const PolicyTable& pi);

/// max_{s,a} |A_old| * 4 gamma / (1 - gamma)^2
double bound_constant(const TabularMDP& mdp, const ExactEval& old_eval);

struct LowerBound {
  double l_pg = 0.0;
  double max_kl = 0.0;
  double C = 0.0;
  double M = 0.0;
};

LowerBound lower_bound_M(const TabularMDP& mdp, const PolicyTable& old_pi, const PolicyTable& new_pi);

// Unbounded KL inside the clipping range --------------------------------------

struct CategoricalKlWitness {
  std::vector<double> p_new;
  std::size_t zeroed = 0;  // index driven toward zero
  double ratio = 1.0;      // at the sampled action
  double kl = 0.0;
};

/// Keeps p(action) fixed, drives another coordinate toward zero and spreads
/// the remaining mass over the rest in proportion to p_old, until KL > target.
/// Needs at least 3 categories.
CategoricalKlWitness unbounded_kl_witness(std::span<const double> p_old, std::size_t action, double eps,
                                          double target);

struct GaussianKlWitness {
  GaussianDist new_dist;
  double ratio = 1.0;
  double kl = 0.0;
};

/// 1-D: shrinks sigma and moves the mean so the density at `action` is unchanged.
GaussianKlWitness unbounded_kl_witness(const GaussianDist& old_dist, double action, double eps, double target);

// Outward push on a shared parameter -------------------------------------------

/// Per-sample surrogate on the tape as a function of (ratio, advantage).
using TapeSurrogate = std::function<Var(Var, double)>;

/// Two states share one scalar theta: logits_i = [theta + offset_i, 0].
/// theta_old defines the sampling policy; the batch is evaluated at theta0.
struct OutwardPushWitness {
  double theta_old = 0.0;
  double theta0 = 1.0;
  std::array<double, 2> offset{0.0, 2.0};
  std::array<std::size_t, 2> action{0, 0};
  std::array<double, 2> advantage{1.0, 1.0};
  double epsilon = 0.2;
  double beta_bar = 0.0;  // |r_1 - 1| strictly increases for steps in (0, beta_bar)

  double ratio(std::size_t i, double theta) const;
  /// d r_i / d theta
  double ratio_grad(std::size_t i, double theta) const;
  /// d/dtheta of the batch-mean surrogate, by reverse mode.
  double objective_grad(const TapeSurrogate& surrogate, double theta) const;
  /// theta after one ascent step of size beta on the surrogate.
  double step(const TapeSurrogate& surrogate, double beta) const;
};

/// Builds and checks the witness against the standard clipped surrogate; any
/// failed check is an internal error.
OutwardPushWitness outward_push_witness(double eps);

// Ascent on a sampled batch with per-state tabular logits --------------------

struct TabularSampleBatch {
  PolicyTable old_pi;
  std::vector<std::size_t> state;
  std::vector<std::size_t> action;
  std::vector<double> advantage;
};

/// Fixed two-state, three-action batch with mixed-sign advantages.
TabularSampleBatch containment_batch();

struct AscentResult {
  Eigen::MatrixXd logits;
  std::vector<double> ratios;
  double objective = 0.0;
  double max_deviation = 0.0;  // max |r - 1|
  std::size_t iterations = 0;
  bool converged = false;
};

/// Backtracking gradient ascent on the batch-mean surrogate over unconstrained
/// logits, started at the old policy. Converged when the step size collapses
/// below 1e-14 (no ascent along the gradient) or the gradient vanishes.
AscentResult ascend_tabular_batch(const TabularSampleBatch& batch, const TapeSurrogate& surrogate,
                                  std::size_t max_iterations = 20000);

// Monotonic improvement ------------------------------------------------------

/// Exact max-KL trust-region rollback objective over the whole state space,
/// with expectations under rho_old and pi_old.
double truly_max_objective(const ExactEval& old_eval, const PolicyTable& old_pi, const PolicyTable& pi,
                           double delta, double alpha);

struct MonotonicOptions {
  std::size_t restarts = 16;
  std::size_t iterations = 10000;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

enum class CheckStatus { pass, fail, inconclusive };
const char* to_string(CheckStatus s);

struct MonotonicResult {
  PolicyTable new_pi;
  double eta_old = 0.0;
  double eta_new = 0.0;
  double objective = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  double max_kl = 0.0;
  double final_stall = 0.0;  // best-objective gain over the last 10% of iterations
  bool converged = false;
  CheckStatus status = CheckStatus::inconclusive;
};

/// Projected gradient ascent on the probability simplex with multi-start.
/// alpha <= 0 selects the bound constant C of old_pi.
MonotonicResult monotonic_improvement_check(const TabularMDP& mdp, const PolicyTable& old_pi, double delta,
                                            double alpha, const MonotonicOptions& options = {});

/// Euclidean projection of v onto {x : x_i >= lo_i, sum x = 1}.
void project_to_simplex(std::span<double> v, std::span<const double> lower);

}  // namespace proxlab
