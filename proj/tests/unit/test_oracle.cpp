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
#include <gtest/gtest.h>

#include <cmath>

#include "core/envs.hpp"
#include "core/error.hpp"
#include "core/objectives.hpp"
#include "core/oracle.hpp"

namespace proxlab {
namespace {

// Independent oracles by fixed-point iteration rather than linear solves.
Eigen::VectorXd value_by_iteration(const TabularMDP& m, const PolicyTable& pi) {
  Eigen::VectorXd V = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.n_states));
  for (int it = 0; it < 3000; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(V.size());
    for (std::size_t s = 0; s < m.n_states; ++s) {
      for (std::size_t a = 0; a < m.n_actions; ++a) {
        double q = m.c(s, a);
        for (std::size_t s2 = 0; s2 < m.n_states; ++s2) q += m.gamma * m.T(s, a, s2) * V(Eigen::Index(s2));
        next(Eigen::Index(s)) += pi(Eigen::Index(s), Eigen::Index(a)) * q;
      }
    }
    V = next;
  }
  return V;
}

Eigen::VectorXd occupancy_by_iteration(const TabularMDP& m, const PolicyTable& pi) {
  const auto n = static_cast<Eigen::Index>(m.n_states);
  Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(m.initial.data(), n);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
  double w = 1.0 - m.gamma;
  for (int t = 0; t < 3000; ++t) {
    rho += w * mu;
    Eigen::VectorXd next = Eigen::VectorXd::Zero(n);
    for (Eigen::Index s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < m.n_actions; ++a) {
        for (Eigen::Index s2 = 0; s2 < n; ++s2) {
          next(s2) += mu(s) * pi(s, Eigen::Index(a)) * m.T(std::size_t(s), a, std::size_t(s2));
        }
      }
    }
    mu = next;
    w *= m.gamma;
  }
  return rho;
}

PolicyTable constant_policy(std::size_t n_states, std::size_t n_actions, std::size_t action) {
  PolicyTable pi = PolicyTable::Zero(Eigen::Index(n_states), Eigen::Index(n_actions));
  pi.col(Eigen::Index(action)).setOnes();
  return pi;
}

TEST(ExactEval, SingleStateGeometricSeries) {
  auto m = TabularMDP::zeros(1, 1, 0.9);
  m.T(0, 0, 0) = 1.0;
  m.c(0, 0) = 1.0;
  m.initial = {1.0};
  const auto ev = exact_eval(m, PolicyTable::Ones(1, 1));
  EXPECT_NEAR(ev.V(0), 10.0, 1e-12);
  EXPECT_NEAR(ev.eta, 1.0, 1e-12);
  EXPECT_NEAR(ev.A(0, 0), 0.0, 1e-12);
}

TEST(ExactEval, ZeroReward) {
  Rng rng(1);
  auto m = random_mdp(3, 2, rng);
  std::fill(m.reward.begin(), m.reward.end(), 0.0);
  const auto ev = exact_eval(m, random_policy_table(3, 2, rng));
  EXPECT_EQ(ev.V.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(ev.eta, 0.0);
  EXPECT_EQ(ev.A.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ExactEval, MatchesIterativeOracles) {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const auto m = random_mdp(2 + k % 4, 2 + k % 2, rng, 0.9);
    const auto pi = random_policy_table(m.n_states, m.n_actions, rng);
    const auto ev = exact_eval(m, pi);
    const auto V = value_by_iteration(m, pi);
    const auto rho = occupancy_by_iteration(m, pi);
    EXPECT_LE((ev.V - V).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((ev.rho - rho).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(rho.sum(), 1.0, 1e-12);
    double eta = 0.0;
    for (std::size_t s = 0; s < m.n_states; ++s) {
      for (std::size_t a = 0; a < m.n_actions; ++a) eta += rho(Eigen::Index(s)) * pi(Eigen::Index(s), Eigen::Index(a)) * m.c(s, a);
    }
    EXPECT_NEAR(ev.eta, eta, 1e-12);
    EXPECT_NEAR(ev.eta, (1 - m.gamma) * Eigen::Map<const Eigen::VectorXd>(m.initial.data(), V.size()).dot(V), 1e-12);
    EXPECT_LE(bellman_residual(m, pi, ev), 1e-12);
    // Advantages average to zero under the policy.
    EXPECT_LE((ev.A.cwiseProduct(pi).rowwise().sum()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExactEval, ChainRightBeatsLeft) {
  const auto m = chain_mdp(3);
  const double right = exact_eval(m, constant_policy(3, 2, 1)).eta;
  const double left = exact_eval(m, constant_policy(3, 2, 0)).eta;
  EXPECT_GT(right, left);
  EXPECT_EQ(left, 0.0);
}

TEST(ExactEval, RejectsBadPolicies) {
  const auto m = chain_mdp(3);
  EXPECT_THROW(exact_eval(m, PolicyTable::Ones(3, 2)), Error);
  EXPECT_THROW(exact_eval(m, PolicyTable::Constant(2, 2, 0.5)), Error);
}

TEST(Bound, TouchesAtOldPolicy) {
  Rng rng(3);
  const auto m = random_mdp(4, 3, rng);
  const auto pi = random_policy_table(4, 3, rng);
  const auto lb = lower_bound_M(m, pi, pi);
  EXPECT_NEAR(lb.M, exact_eval(m, pi).eta, 1e-12);
  EXPECT_EQ(lb.max_kl, 0.0);
}

TEST(Bound, SurrogateAndConstantByHand) {
  Rng rng(4);
  const auto m = random_mdp(3, 2, rng, 0.8);
  const auto old_pi = random_policy_table(3, 2, rng);
  const auto new_pi = random_policy_table(3, 2, rng);
  const auto ev = exact_eval(m, old_pi);
  double lpg = ev.eta;
  double kmax = 0.0;
  for (Eigen::Index s = 0; s < 3; ++s) {
    double k = 0.0;
    for (Eigen::Index a = 0; a < 2; ++a) {
      lpg += ev.rho(s) * new_pi(s, a) * ev.A(s, a);
      k += old_pi(s, a) * std::log(old_pi(s, a) / new_pi(s, a));
    }
    kmax = std::max(kmax, k);
  }
  EXPECT_NEAR(surrogate_lpg(ev, new_pi), lpg, 1e-12);
  EXPECT_NEAR(max_state_kl(old_pi, new_pi), kmax, 1e-12);
  const double C = ev.A.cwiseAbs().maxCoeff() * 4 * 0.8 / (0.2 * 0.2);
  EXPECT_NEAR(bound_constant(m, ev), C, 1e-9);
  const auto lb = lower_bound_M(m, old_pi, new_pi);
  EXPECT_NEAR(lb.M, lpg - C * kmax, 1e-9);
}

TEST(Bound, HoldsOnRandomPairsAndCanBeLoose) {
  Rng rng(5);
  bool loose = false;
  for (int k = 0; k < 300; ++k) {
    const auto m = random_mdp(4, 3, rng);
    const auto old_pi = random_policy_table(4, 3, rng);
    const auto new_pi = random_policy_table(4, 3, rng);
    const auto lb = lower_bound_M(m, old_pi, new_pi);
    EXPECT_GE(exact_eval(m, new_pi).eta, lb.M - 1e-9);
    loose = loose || lb.M < exact_eval(m, old_pi).eta;
  }
  EXPECT_TRUE(loose);
}

TEST(KlWitness, CategoricalUniform) {
  const std::vector<double> p_old(3, 1.0 / 3.0);
  const auto w = unbounded_kl_witness(p_old, 0, 0.2, 10.0);
  EXPECT_EQ(w.ratio, 1.0);
  EXPECT_GT(w.kl, 10.0);
  EXPECT_NE(w.zeroed, 0u);
  EXPECT_NEAR(w.p_new[0] + w.p_new[1] + w.p_new[2], 1.0, 1e-12);
  EXPECT_NEAR(kl_categorical(p_old, w.p_new), w.kl, 1e-12);
  EXPECT_THROW(unbounded_kl_witness(std::vector<double>{0.5, 0.5}, 0, 0.2, 1.0), Error);
}

TEST(KlWitness, CategoricalTargetZero) {
  const std::vector<double> p_old{0.2, 0.3, 0.5};
  const auto w = unbounded_kl_witness(p_old, 1, 0.2, 0.0);
  EXPECT_GT(w.kl, 0.0);
  EXPECT_LE(std::abs(w.ratio - 1.0), 0.2);
}

TEST(KlWitness, GaussianPreservesDensity) {
  const GaussianDist old_d{{0.0}, {0.0}};
  const auto w = unbounded_kl_witness(old_d, 0.0, 0.2, 10.0);
  const double sigma = std::exp(w.new_dist.log_std[0]);
  EXPECT_LT(sigma, 1.0);
  EXPECT_NEAR(std::abs(w.new_dist.mean[0]), sigma * std::sqrt(2 * std::log(1 / sigma)), 1e-12);
  const double a[] = {0.0};
  EXPECT_NEAR(std::exp(log_prob(w.new_dist, a).value - log_prob(old_d, a).value), 1.0, 1e-12);
  EXPECT_LE(std::abs(w.ratio - 1.0), 0.2);
  EXPECT_GT(kl_gaussian(old_d, w.new_dist), 10.0);
}

TEST(OutwardPush, WitnessProperties) {
  const auto w = outward_push_witness(0.2);
  const TapeSurrogate clip = [](Var r, double A) { return l_clip(r, A, 0.2); };
  const TapeSurrogate rb = [](Var r, double A) { return l_rb(r, A, 0.2, 0.3); };
  EXPECT_GT(w.ratio(0, w.theta0), 1.2);  // first sample starts outside the range
  EXPECT_GT(w.objective_grad(clip, w.theta0) * w.ratio_grad(0, w.theta0) * w.advantage[0], 0.0);
  const double before = std::abs(w.ratio(0, w.theta0) - 1.0);
  const double beta = w.beta_bar / 2;
  EXPECT_GT(std::abs(w.ratio(0, w.step(clip, beta)) - 1.0), before);
  EXPECT_LT(std::abs(w.ratio(0, w.step(rb, beta)) - 1.0), std::abs(w.ratio(0, w.step(clip, beta)) - 1.0));
  // Increase holds across the whole interval (0, beta_bar).
  for (double b = w.beta_bar * 0.999; b > 1e-6; b /= 2) {
    EXPECT_GT(std::abs(w.ratio(0, w.step(clip, b)) - 1.0), before) << b;
  }
  EXPECT_THROW(outward_push_witness(0.5), Error);
}

TEST(Containment, RollbackKeepsRatiosNearTheRange) {
  const auto batch = containment_batch();
  const auto rb = ascend_tabular_batch(batch, [](Var r, double A) { return l_rb(r, A, 0.2, 1e3); });
  const auto clip = ascend_tabular_batch(batch, [](Var r, double A) { return l_clip(r, A, 0.2); });
  EXPECT_TRUE(rb.converged);
  EXPECT_LE(rb.max_deviation, 0.2 + 1e-3);
  EXPECT_GT(clip.max_deviation, 0.2);
  ASSERT_EQ(rb.ratios.size(), batch.action.size());
}

TEST(Containment, AscentImprovesTheObjective) {
  const auto batch = containment_batch();
  const TapeSurrogate pg = [](Var r, double A) { return l_rb(r, A, 0.2, 0.3); };
  const auto res = ascend_tabular_batch(batch, pg);
  double at_old = 0.0;
  for (double A : batch.advantage) at_old += A;
  at_old /= static_cast<double>(batch.advantage.size());
  EXPECT_GE(res.objective, at_old);
}

TEST(Simplex, Projection) {
  std::vector<double> v{0.5, 0.7, -0.4};
  const std::vector<double> lo(3, 0.0);
  project_to_simplex(v, lo);
  EXPECT_NEAR(v[0] + v[1] + v[2], 1.0, 1e-15);
  EXPECT_NEAR(v[0], 0.4, 1e-15);
  EXPECT_NEAR(v[1], 0.6, 1e-15);
  EXPECT_EQ(v[2], 0.0);
  std::vector<double> w{0.9, 0.1};
  const std::vector<double> floor{0.0, 0.3};
  project_to_simplex(w, floor);
  EXPECT_NEAR(w[0], 0.7, 1e-15);
  EXPECT_NEAR(w[1], 0.3, 1e-15);
}

TEST(Monotonic, UniformOnChainImproves) {
  const auto m = chain_mdp(3);
  const PolicyTable uniform = PolicyTable::Constant(3, 2, 0.5);
  const auto res = monotonic_improvement_check(m, uniform, 1e-3, 0.0);
  EXPECT_NE(res.status, CheckStatus::fail);
  EXPECT_GE(res.eta_new, res.eta_old - 1e-9);
  EXPECT_NEAR(res.alpha, bound_constant(m, exact_eval(m, uniform)), 1e-12);
}

TEST(Monotonic, OptimalPolicyCannotImprove) {
  const auto m = chain_mdp(3);
  const auto right = constant_policy(3, 2, 1);
  const auto res = monotonic_improvement_check(m, right, 1e-3, 0.0);
  EXPECT_NEAR(res.eta_new, res.eta_old, 1e-9);
  EXPECT_NE(res.status, CheckStatus::fail);
}

TEST(Monotonic, ObjectiveAtOldPolicyIsShiftedSurrogate) {
  Rng rng(6);
  const auto m = random_mdp(3, 2, rng);
  const auto pi = random_policy_table(3, 2, rng);
  const auto ev = exact_eval(m, pi);
  // Inside the region every state takes the -delta branch.
  EXPECT_NEAR(truly_max_objective(ev, pi, pi, 0.01, 5.0), ev.eta - 0.01, 1e-12);
}

TEST(Monotonic, RandomInstances) {
  Rng rng(7);
  for (int k = 0; k < 5; ++k) {
    const auto m = random_mdp(4, 3, rng);
    const auto pi = random_policy_table(4, 3, rng);
    MonotonicOptions opt;
    opt.seed = static_cast<std::uint64_t>(k);
    const auto res = monotonic_improvement_check(m, pi, 1e-3, 0.0, opt);
    EXPECT_NE(res.status, CheckStatus::fail);
    EXPECT_GE(res.eta_new, res.eta_old - 1e-9);
  }
}

}  // namespace
}  // namespace proxlab
