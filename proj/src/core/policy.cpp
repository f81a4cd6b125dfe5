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
#include "core/policy.hpp"

#include <cmath>

#include "core/error.hpp"

namespace proxlab {

ActorCritic ActorCritic::create(std::size_t obs_dim, ActionSpace space, std::span<const std::size_t> hidden,
                                double init_log_std, Rng& rng) {
  if (obs_dim == 0 || space.n == 0) fail(ErrorCode::invalid_argument, "empty observation or action space");
  ActorCritic m;
  m.space = space;
  std::vector<std::size_t> sizes{obs_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  auto pi_sizes = sizes;
  pi_sizes.push_back(space.n);
  auto v_sizes = sizes;
  v_sizes.push_back(1);
  // Small last layer: the initial policy is close to uniform / zero-mean.
  m.policy = mlp_init(pi_sizes, rng, 0.01);
  m.value_fn = mlp_init(v_sizes, rng, 1.0);
  if (!space.discrete) m.log_std.assign(space.n, init_log_std);
  return m;
}

std::size_t ActorCritic::param_count() const {
  return policy.values.size() + log_std.size() + value_fn.values.size();
}

std::vector<double> ActorCritic::flat() const {
  std::vector<double> out;
  out.reserve(param_count());
  out.insert(out.end(), policy.values.begin(), policy.values.end());
  out.insert(out.end(), log_std.begin(), log_std.end());
  out.insert(out.end(), value_fn.values.begin(), value_fn.values.end());
  return out;
}

void ActorCritic::set_flat(std::span<const double> params) {
  if (params.size() != param_count()) fail(ErrorCode::invalid_argument, "parameter vector has the wrong length");
  auto it = params.begin();
  std::copy(it, it + static_cast<std::ptrdiff_t>(policy.values.size()), policy.values.begin());
  it += static_cast<std::ptrdiff_t>(policy.values.size());
  std::copy(it, it + static_cast<std::ptrdiff_t>(log_std.size()), log_std.begin());
  it += static_cast<std::ptrdiff_t>(log_std.size());
  std::copy(it, params.end(), value_fn.values.begin());
}

PolicyDist ActorCritic::dist_from_output(std::span<const double> head) const {
  if (space.discrete) return CategoricalDist{{head.begin(), head.end()}};
  return GaussianDist{{head.begin(), head.end()}, log_std};
}

PolicyDist ActorCritic::dist(std::span<const double> obs) const { return dist_from_output(mlp_eval(policy, obs)); }

double ActorCritic::value(std::span<const double> obs) const { return mlp_eval(value_fn, obs)[0]; }

TrackedActorCritic track(Tape& tape, const ActorCritic& model) {
  TrackedActorCritic t;
  t.policy = tape.leaves(model.policy.values);
  t.log_std = tape.leaves(model.log_std);
  t.value_fn = tape.leaves(model.value_fn.values);
  return t;
}

DistVar policy_dist(Tape& tape, const ActorCritic& model, const TrackedActorCritic& leaves,
                    std::span<const double> obs) {
  auto out = mlp_forward(tape, model.policy, leaves.policy, obs);
  if (model.space.discrete) return DistVar::make_categorical(std::move(out));
  return DistVar::make_gaussian(std::move(out), leaves.log_std);
}

Var value_estimate(Tape& tape, const ActorCritic& model, const TrackedActorCritic& leaves,
                   std::span<const double> obs) {
  return mlp_forward(tape, model.value_fn, leaves.value_fn, obs)[0];
}

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {
  if (!(learning_rate > 0.0)) fail(ErrorCode::invalid_argument, "learning rate must be positive");
}

void Adam::ascend(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    fail(ErrorCode::invalid_argument, "optimizer state does not match the parameter count");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] += lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace proxlab
