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
#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"
#include "core/objectives.hpp"
#include "core/tracked.hpp"

namespace proxlab {

void validate_policy(const TabularMDP& mdp, const PolicyTable& pi) {
  if (static_cast<std::size_t>(pi.rows()) != mdp.n_states || static_cast<std::size_t>(pi.cols()) != mdp.n_actions) {
    fail(ErrorCode::invalid_argument, "policy table shape does not match the MDP");
  }
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    double total = 0.0;
    for (Eigen::Index a = 0; a < pi.cols(); ++a) {
      if (!(pi(s, a) >= 0.0) || !std::isfinite(pi(s, a))) {
        fail(ErrorCode::invalid_argument, "policy table has a negative or non-finite entry");
      }
      total += pi(s, a);
    }
    if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::invalid_argument, "policy row does not sum to 1");
  }
}

namespace {

Eigen::MatrixXd policy_transition(const TabularMDP& mdp, const PolicyTable& pi) {
  const auto n = static_cast<Eigen::Index>(mdp.n_states);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      const double w = pi(s, a);
      if (w == 0.0) continue;
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) P(s, s2) += w * mdp.T(s, a, s2);
    }
  }
  return P;
}

Eigen::VectorXd policy_reward(const TabularMDP& mdp, const PolicyTable& pi) {
  Eigen::VectorXd c(mdp.n_states);
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < mdp.n_actions; ++a) acc += pi(s, a) * mdp.c(s, a);
    c(s) = acc;
  }
  return c;
}

Eigen::VectorXd solve_checked(const Eigen::MatrixXd& M, const Eigen::VectorXd& b) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) fail(ErrorCode::internal, "singular linear system in exact evaluation");
  // One step of iterative refinement keeps the Bellman residual near machine precision.
  x += lu.solve(b - M * x);
  return x;
}

}  // namespace

ExactEval exact_eval(const TabularMDP& mdp, const PolicyTable& pi) {
  mdp.validate();
  validate_policy(mdp, pi);
  const auto n = static_cast<Eigen::Index>(mdp.n_states);
  const Eigen::MatrixXd P = policy_transition(mdp, pi);
  const Eigen::VectorXd c_pi = policy_reward(mdp, pi);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

  ExactEval ev;
  ev.V = solve_checked(I - mdp.gamma * P, c_pi);
  ev.Q.resize(n, static_cast<Eigen::Index>(mdp.n_actions));
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      double next = 0.0;
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) next += mdp.T(s, a, s2) * ev.V(s2);
      ev.Q(s, a) = mdp.c(s, a) + mdp.gamma * next;
    }
  }
  ev.A = ev.Q.colwise() - ev.V;
  const Eigen::VectorXd rho1 = Eigen::Map<const Eigen::VectorXd>(mdp.initial.data(), n);
  ev.rho = solve_checked(I - mdp.gamma * P.transpose(), (1.0 - mdp.gamma) * rho1);
  ev.eta = ev.rho.dot(c_pi);
  return ev;
}

double bellman_residual(const TabularMDP& mdp, const PolicyTable& pi, const ExactEval& ev) {
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.n_states; ++s) {
    double backup = 0.0;
    for (std::size_t a = 0; a < mdp.n_actions; ++a) {
      double next = 0.0;
      for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) next += mdp.T(s, a, s2) * ev.V(s2);
      backup += pi(s, a) * (mdp.c(s, a) + mdp.gamma * next);
    }
    worst = std::max(worst, std::abs(ev.V(s) - backup));
  }
  return worst;
}

double surrogate_lpg(const ExactEval& old_eval, const PolicyTable& pi) {
  double gain = 0.0;
  for (Eigen::Index s = 0; s < pi.rows(); ++s) gain += old_eval.rho(s) * pi.row(s).dot(old_eval.A.row(s));
  return old_eval.eta + gain;
}

double max_state_kl(const PolicyTable& old_pi, const PolicyTable& pi) {
  if (old_pi.rows() != pi.rows() || old_pi.cols() != pi.cols()) {
    fail(ErrorCode::invalid_argument, "policy tables differ in shape");
  }
  double worst = 0.0;
  std::vector<double> p_old(static_cast<std::size_t>(pi.cols()));
  std::vector<double> p_new(p_old.size());
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    for (Eigen::Index a = 0; a < pi.cols(); ++a) {
      p_old[static_cast<std::size_t>(a)] = old_pi(s, a);
      p_new[static_cast<std::size_t>(a)] = pi(s, a);
    }
    worst = std::max(worst, kl_categorical(p_old, p_new));
  }
  return worst;
}

double bound_constant(const TabularMDP& mdp, const ExactEval& old_eval) {
  const double g = mdp.gamma;
  return old_eval.A.cwiseAbs().maxCoeff() * 4.0 * g / ((1.0 - g) * (1.0 - g));
}

LowerBound lower_bound_M(const TabularMDP& mdp, const PolicyTable& old_pi, const PolicyTable& new_pi) {
  validate_policy(mdp, new_pi);
  const ExactEval old_eval = exact_eval(mdp, old_pi);
  LowerBound b;
  b.l_pg = surrogate_lpg(old_eval, new_pi);
  b.max_kl = max_state_kl(old_pi, new_pi);
  b.C = bound_constant(mdp, old_eval);
  b.M = b.l_pg - b.C * b.max_kl;
  return b;
}

// ---------------------------------------------------------------------------

CategoricalKlWitness unbounded_kl_witness(std::span<const double> p_old, std::size_t action, double eps,
                                          double target) {
  if (p_old.size() < 3) fail(ErrorCode::invalid_argument, "the categorical witness needs at least 3 categories");
  if (action >= p_old.size()) fail(ErrorCode::invalid_argument, "sampled action out of range");
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::invalid_argument, "epsilon must lie in (0, 1)");
  if (!std::isfinite(target)) fail(ErrorCode::invalid_argument, "target must be finite");
  if (!(p_old[action] > 0.0)) fail(ErrorCode::invalid_argument, "sampled action must have positive probability");
  // Zero out the largest other coordinate; the rest must keep positive mass.
  std::size_t z = action == 0 ? 1 : 0;
  for (std::size_t d = 0; d < p_old.size(); ++d) {
    if (d != action && p_old[d] > p_old[z]) z = d;
  }
  double rest_old = 0.0;
  for (std::size_t d = 0; d < p_old.size(); ++d) {
    if (d != action && d != z) rest_old += p_old[d];
  }
  if (!(p_old[z] > 0.0) || !(rest_old > 0.0)) {
    fail(ErrorCode::invalid_argument, "old distribution needs two positive non-sampled categories");
  }
  CategoricalKlWitness w;
  w.zeroed = z;
  for (double x = 1.0; x < 1e4; x *= 2.0) {
    w.p_new.assign(p_old.begin(), p_old.end());
    w.p_new[z] = p_old[z] * std::exp(-x);
    const double rest_new = 1.0 - p_old[action] - w.p_new[z];
    for (std::size_t d = 0; d < p_old.size(); ++d) {
      if (d != action && d != z) w.p_new[d] = p_old[d] * (rest_new / rest_old);
    }
    w.kl = kl_categorical(p_old, w.p_new);
    if (w.kl > target) break;
  }
  w.ratio = w.p_new[action] / p_old[action];
  if (!(w.kl > target) || std::abs(w.ratio - 1.0) > eps) fail(ErrorCode::internal, "categorical witness failed");
  return w;
}

GaussianKlWitness unbounded_kl_witness(const GaussianDist& old_dist, double action, double eps, double target) {
  old_dist.validate();
  if (old_dist.dim() != 1) fail(ErrorCode::invalid_argument, "the gaussian witness is one-dimensional");
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::invalid_argument, "epsilon must lie in (0, 1)");
  if (!std::isfinite(target) || !std::isfinite(action)) fail(ErrorCode::invalid_argument, "target must be finite");
  const double mu0 = old_dist.mean[0];
  const double ls0 = old_dist.log_std[0];
  const double z0 = (action - mu0) * std::exp(-ls0);
  const double lp_old = log_prob(old_dist, std::vector<double>{action}).value;
  GaussianKlWitness w;
  for (double k = 1.0; k < 700.0; k += 1.0) {
    // sigma = sigma0 e^{-k}; |a - mu| / sigma = sqrt(2k + z0^2) keeps the density at a.
    const double ls = ls0 - k;
    const double mu = action + std::exp(ls) * std::sqrt(2.0 * k + z0 * z0);
    w.new_dist = GaussianDist{{mu}, {ls}};
    w.kl = kl_gaussian(old_dist, w.new_dist);
    if (w.kl > target) break;
  }
  w.ratio = ratio(log_prob(w.new_dist, std::vector<double>{action}), LogProb{lp_old});
  if (!(w.kl > target) || std::abs(w.ratio - 1.0) > eps) fail(ErrorCode::internal, "gaussian witness failed");
  return w;
}

// ---------------------------------------------------------------------------

namespace {
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

double OutwardPushWitness::ratio(std::size_t i, double theta) const {
  const double p = sigmoid(theta + offset[i]);
  const double p_old = sigmoid(theta_old + offset[i]);
  return action[i] == 0 ? p / p_old : (1.0 - p) / (1.0 - p_old);
}

double OutwardPushWitness::ratio_grad(std::size_t i, double theta) const {
  const double p = sigmoid(theta + offset[i]);
  const double p_old = sigmoid(theta_old + offset[i]);
  const double dp = p * (1.0 - p);
  return action[i] == 0 ? dp / p_old : -dp / (1.0 - p_old);
}

double OutwardPushWitness::objective_grad(const TapeSurrogate& surrogate, double theta) const {
  Tape tape;
  const Var th = tape.leaf(theta);
  const Var zero = tape.leaf(0.0);
  std::vector<Var> terms;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto d = DistVar::make_categorical({th + offset[i], zero});
    const double old_lp = log_prob(CategoricalDist{{theta_old + offset[i], 0.0}}, action[i]).value;
    const Var r = exp(log_prob(tape, d, Action{action[i]}) - old_lp);
    terms.push_back(surrogate(r, advantage[i]));
  }
  const Var mean = tape.sum(terms) / 2.0;
  const Var wrt[] = {th};
  return tape.gradient(mean, wrt)[0];
}

double OutwardPushWitness::step(const TapeSurrogate& surrogate, double beta) const {
  return theta0 + beta * objective_grad(surrogate, theta0);
}

OutwardPushWitness outward_push_witness(double eps) {
  if (!(eps > 0.0 && eps < 0.4)) fail(ErrorCode::invalid_argument, "witness is built for epsilon in (0, 0.4)");
  OutwardPushWitness w;
  w.epsilon = eps;
  const TapeSurrogate clip = [eps](Var r, double A) { return l_clip(r, A, eps); };
  const double r1 = w.ratio(0, w.theta0);
  const double r2 = w.ratio(1, w.theta0);
  if (!(std::abs(r1 - 1.0) >= eps && r1 * w.advantage[0] >= w.advantage[0])) {
    fail(ErrorCode::internal, "witness sample 1 is not clipped");
  }
  if (!(std::abs(r2 - 1.0) < eps)) fail(ErrorCode::internal, "witness sample 2 is not inside the range");
  const double g = w.objective_grad(clip, w.theta0);
  if (!(g * w.ratio_grad(0, w.theta0) * w.advantage[0] > 0.0)) {
    fail(ErrorCode::internal, "witness violates the alignment condition");
  }
  const double base = std::abs(r1 - 1.0);
  for (double bar = 1.0; bar > 1e-8; bar *= 0.5) {
    bool ok = true;
    for (double beta = bar; beta > bar * 1e-9; beta *= 0.5) {
      if (!(std::abs(w.ratio(0, w.theta0 + beta * g) - 1.0) > base)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      w.beta_bar = bar;
      return w;
    }
  }
  fail(ErrorCode::internal, "no step size pushes the witness outward");
}

// ---------------------------------------------------------------------------

TabularSampleBatch containment_batch() {
  TabularSampleBatch b;
  b.old_pi.resize(2, 3);
  b.old_pi << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5, 0.3, 0.2;
  b.state = {0, 0, 1, 1, 1};
  b.action = {1, 2, 0, 1, 2};
  b.advantage = {1.0, -1.0, 1.0, -0.5, 0.8};
  return b;
}

namespace {

struct BatchEval {
  double value = 0.0;
  Eigen::MatrixXd grad;
};

BatchEval eval_tabular_batch(const TabularSampleBatch& b, const Eigen::MatrixXd& logits,
                             const TapeSurrogate& surrogate, bool with_grad) {
  Tape tape;
  const auto S = logits.rows();
  const auto A = logits.cols();
  std::vector<std::vector<Var>> rows(static_cast<std::size_t>(S));
  std::vector<Var> all;
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) {
      rows[static_cast<std::size_t>(s)].push_back(tape.leaf(logits(s, a)));
      all.push_back(rows[static_cast<std::size_t>(s)].back());
    }
  }
  std::vector<Var> terms;
  for (std::size_t i = 0; i < b.state.size(); ++i) {
    const auto d = DistVar::make_categorical(rows[b.state[i]]);
    const double old_lp = std::log(b.old_pi(static_cast<Eigen::Index>(b.state[i]), static_cast<Eigen::Index>(b.action[i])));
    const Var r = exp(log_prob(tape, d, Action{b.action[i]}) - old_lp);
    terms.push_back(surrogate(r, b.advantage[i]));
  }
  const Var mean = tape.sum(terms) / static_cast<double>(terms.size());
  BatchEval out;
  out.value = mean.value();
  if (with_grad) {
    const auto g = tape.gradient(mean, all);
    out.grad.resize(S, A);
    for (Eigen::Index s = 0; s < S; ++s) {
      for (Eigen::Index a = 0; a < A; ++a) out.grad(s, a) = g[static_cast<std::size_t>(s * A + a)];
    }
  }
  return out;
}

}  // namespace

AscentResult ascend_tabular_batch(const TabularSampleBatch& batch, const TapeSurrogate& surrogate,
                                  std::size_t max_iterations) {
  if (batch.state.size() != batch.action.size() || batch.state.size() != batch.advantage.size() ||
      batch.state.empty()) {
    fail(ErrorCode::invalid_argument, "tabular batch fields differ in length");
  }
  AscentResult res;
  res.logits = batch.old_pi.array().log().matrix();
  double lr = 0.1;
  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    const BatchEval here = eval_tabular_batch(batch, res.logits, surrogate, true);
    if (here.grad.cwiseAbs().maxCoeff() < 1e-14) {
      res.converged = true;
      break;
    }
    bool moved = false;
    while (lr > 1e-14) {
      const Eigen::MatrixXd trial = res.logits + lr * here.grad;
      if (eval_tabular_batch(batch, trial, surrogate, false).value > here.value) {
        res.logits = trial;
        lr *= 1.2;
        moved = true;
        break;
      }
      lr *= 0.5;
    }
    if (!moved) {
      res.converged = true;
      break;
    }
  }
  const PolicyTable pi = softmax_table(res.logits);
  res.objective = eval_tabular_batch(batch, res.logits, surrogate, false).value;
  res.max_deviation = 0.0;
  for (std::size_t i = 0; i < batch.state.size(); ++i) {
    const auto s = static_cast<Eigen::Index>(batch.state[i]);
    const auto a = static_cast<Eigen::Index>(batch.action[i]);
    res.ratios.push_back(pi(s, a) / batch.old_pi(s, a));
    res.max_deviation = std::max(res.max_deviation, std::abs(res.ratios.back() - 1.0));
  }
  return res;
}

// ---------------------------------------------------------------------------

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

double state_kl(const PolicyTable& old_pi, const PolicyTable& pi, Eigen::Index s) {
  double kl = 0.0;
  for (Eigen::Index a = 0; a < pi.cols(); ++a) {
    const double p = old_pi(s, a);
    if (p == 0.0) continue;
    if (pi(s, a) == 0.0) return std::numeric_limits<double>::infinity();
    kl += p * (std::log(p) - std::log(pi(s, a)));
  }
  return std::max(kl, 0.0);
}

// Some sampled action in state s has r*A >= A.
bool improved_somewhere(const ExactEval& ev, const PolicyTable& old_pi, const PolicyTable& pi, Eigen::Index s) {
  for (Eigen::Index a = 0; a < pi.cols(); ++a) {
    if (old_pi(s, a) == 0.0) continue;
    const double r = pi(s, a) / old_pi(s, a);
    if (r * ev.A(s, a) >= ev.A(s, a)) return true;
  }
  return false;
}

struct TrulyEval {
  double value = 0.0;
  Eigen::MatrixXd grad;
};

TrulyEval truly_eval(const ExactEval& ev, const PolicyTable& old_pi, const PolicyTable& pi, double delta,
                     double alpha, bool with_grad) {
  Eigen::Index worst = 0;
  double max_kl = -1.0;
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    const double k = state_kl(old_pi, pi, s);
    if (k > max_kl) {
      max_kl = k;
      worst = s;
    }
  }
  TrulyEval out;
  double value = ev.eta;
  double penalized_mass = 0.0;  // rho mass of states on the rollback branch
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    value += ev.rho(s) * pi.row(s).dot(ev.A.row(s));
    if (max_kl >= delta && improved_somewhere(ev, old_pi, pi, s)) {
      value -= ev.rho(s) * alpha * max_kl;
      penalized_mass += ev.rho(s);
    } else {
      value -= ev.rho(s) * delta;
    }
  }
  out.value = value;
  if (with_grad) {
    out.grad = ev.A;
    for (Eigen::Index s = 0; s < pi.rows(); ++s) out.grad.row(s) *= ev.rho(s);
    if (penalized_mass > 0.0) {
      for (Eigen::Index a = 0; a < pi.cols(); ++a) {
        if (old_pi(worst, a) == 0.0) continue;
        out.grad(worst, a) += alpha * penalized_mass * old_pi(worst, a) / pi(worst, a);
      }
    }
  }
  return out;
}

}  // namespace

double truly_max_objective(const ExactEval& old_eval, const PolicyTable& old_pi, const PolicyTable& pi,
                           double delta, double alpha) {
  return truly_eval(old_eval, old_pi, pi, delta, alpha, false).value;
}

void project_to_simplex(std::span<double> v, std::span<const double> lower) {
  if (v.size() != lower.size() || v.empty()) fail(ErrorCode::invalid_argument, "projection size mismatch");
  double budget = 1.0;
  for (double l : lower) budget -= l;
  if (budget < 0.0) fail(ErrorCode::invalid_argument, "lower bounds exceed the simplex");
  // Shift so the problem is projection onto the scaled simplex {y >= 0, sum y = budget}.
  std::vector<double> y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) y[i] = v[i] - lower[i];
  std::vector<double> sorted(y);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cum += sorted[k];
    const double t = (cum - budget) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) tau = t;
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(y[i] - tau, 0.0) + lower[i];
}

MonotonicResult monotonic_improvement_check(const TabularMDP& mdp, const PolicyTable& old_pi, double delta,
                                            double alpha, const MonotonicOptions& options) {
  if (!(delta > 0.0)) fail(ErrorCode::invalid_argument, "delta must be positive");
  if (options.restarts == 0 || options.iterations == 0) fail(ErrorCode::invalid_argument, "empty optimizer budget");
  const ExactEval old_eval = exact_eval(mdp, old_pi);
  MonotonicResult res;
  res.delta = delta;
  res.alpha = alpha > 0.0 ? alpha : bound_constant(mdp, old_eval);
  res.eta_old = old_eval.eta;

  const auto S = old_pi.rows();
  const auto A = old_pi.cols();
  // Keep support where the old policy has mass so every KL stays finite.
  Eigen::MatrixXd floor(S, A);
  for (Eigen::Index s = 0; s < S; ++s) {
    for (Eigen::Index a = 0; a < A; ++a) floor(s, a) = old_pi(s, a) > 0.0 ? 1e-12 : 0.0;
  }
  auto project = [&](PolicyTable& pi) {
    std::vector<double> row(static_cast<std::size_t>(A));
    std::vector<double> lo(static_cast<std::size_t>(A));
    for (Eigen::Index s = 0; s < S; ++s) {
      for (Eigen::Index a = 0; a < A; ++a) {
        row[static_cast<std::size_t>(a)] = pi(s, a);
        lo[static_cast<std::size_t>(a)] = floor(s, a);
      }
      project_to_simplex(row, lo);
      for (Eigen::Index a = 0; a < A; ++a) pi(s, a) = row[static_cast<std::size_t>(a)];
    }
  };

  Rng rng(options.seed);
  std::uniform_real_distribution<double> mix(0.0, 0.5);
  const std::size_t tail = std::max<std::size_t>(1, options.iterations / 10);
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t restart = 0; restart < options.restarts; ++restart) {
    PolicyTable pi = old_pi;
    if (restart > 0) {
      const double t = mix(rng);
      pi = (1.0 - t) * old_pi + t * random_policy_table(static_cast<std::size_t>(S), static_cast<std::size_t>(A), rng);
    }
    project(pi);
    TrulyEval here = truly_eval(old_eval, old_pi, pi, delta, res.alpha, true);
    double lr = options.learning_rate;
    double value_at_tail_start = here.value;
    bool stalled = false;
    for (std::size_t it = 0; it < options.iterations; ++it) {
      if (it == options.iterations - tail) value_at_tail_start = here.value;
      bool moved = false;
      while (lr > 1e-15) {
        PolicyTable trial = pi + lr * here.grad;
        project(trial);
        const TrulyEval next = truly_eval(old_eval, old_pi, trial, delta, res.alpha, true);
        if (next.value > here.value) {
          pi = std::move(trial);
          here = next;
          lr *= 1.5;
          moved = true;
          break;
        }
        lr *= 0.5;
      }
      if (!moved) {
        stalled = true;
        break;
      }
    }
    const double stall = stalled ? 0.0 : here.value - value_at_tail_start;
    if (here.value > best_value) {
      best_value = here.value;
      res.new_pi = pi;
      res.objective = here.value;
      res.final_stall = stall;
      res.converged = stalled || stall < 1e-10;
    }
  }
  res.max_kl = max_state_kl(old_pi, res.new_pi);
  res.eta_new = exact_eval(mdp, res.new_pi).eta;
  if (!res.converged) {
    res.status = CheckStatus::inconclusive;
  } else {
    res.status = res.eta_new >= res.eta_old - 1e-9 ? CheckStatus::pass : CheckStatus::fail;
  }
  return res;
}

}  // namespace proxlab
