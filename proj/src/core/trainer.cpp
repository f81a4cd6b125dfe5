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
#include "core/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "core/advantage.hpp"
#include "core/error.hpp"

namespace proxlab {

double LinearAnneal::at(std::size_t epoch, std::size_t n_epochs) const {
  if (n_epochs == 0) return start;
  const double frac = static_cast<double>(epoch) / static_cast<double>(n_epochs);
  return start + (end - start) * frac;
}

void TrainConfig::validate() const {
  objective.validate();
  if (epsilon_anneal && !(epsilon_anneal->start > 0.0 && epsilon_anneal->start < 1.0 && epsilon_anneal->end >= 0.0 &&
                          epsilon_anneal->end < 1.0)) {
    fail(ErrorCode::invalid_argument, "epsilon annealing must stay within [0, 1) and start above 0");
  }
  if (delta_anneal && !(delta_anneal->start > 0.0 && delta_anneal->end >= 0.0)) {
    fail(ErrorCode::invalid_argument, "delta annealing must start above 0 and stay non-negative");
  }
  if (timesteps_per_epoch == 0 || minibatch_size == 0 || optimization_epochs == 0 || n_envs == 0 ||
      total_timesteps == 0) {
    fail(ErrorCode::invalid_argument, "step counts must be positive");
  }
  if (timesteps_per_epoch % minibatch_size != 0) {
    fail(ErrorCode::invalid_argument, "timesteps_per_epoch must be divisible by minibatch_size");
  }
  if (timesteps_per_epoch % n_envs != 0) {
    fail(ErrorCode::invalid_argument, "timesteps_per_epoch must be divisible by n_envs");
  }
  if (!(learning_rate > 0.0)) fail(ErrorCode::invalid_argument, "learning_rate must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) fail(ErrorCode::invalid_argument, "gamma must lie in (0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_argument, "lambda must lie in [0, 1]");
  if (entropy_coef && !(*entropy_coef >= 0.0)) fail(ErrorCode::invalid_argument, "entropy_coef must be non-negative");
  if (!(value_loss_coef >= 0.0)) fail(ErrorCode::invalid_argument, "value_loss_coef must be non-negative");
  for (std::size_t h : hidden) {
    if (h == 0) fail(ErrorCode::invalid_argument, "hidden layer sizes must be positive");
  }
  if (!std::isfinite(init_log_std)) fail(ErrorCode::invalid_argument, "init_log_std must be finite");
}

std::size_t TrainConfig::epochs() const {
  return (total_timesteps + timesteps_per_epoch - 1) / timesteps_per_epoch;
}

ObjectiveConfig TrainConfig::objective_at(std::size_t epoch) const {
  ObjectiveConfig c = objective;
  if (epsilon_anneal) c.epsilon = epsilon_anneal->at(epoch, epochs());
  if (delta_anneal) c.delta = delta_anneal->at(epoch, epochs());
  return c;
}

struct MinibatchWorkspace {
  Eigen::MatrixXd x;
  MlpBatchCache cache_pi;
  MlpBatchCache cache_v;
  Tape tape;
};

double minibatch_gradient(const ActorCritic& model, const ObjectiveConfig& obj, const SampleBatch& batch,
                          std::span<const std::size_t> rows, double entropy_coef, double value_loss_coef,
                          double penalty_alpha, std::span<double> grad, MinibatchWorkspace* workspace) {
  if (rows.empty()) fail(ErrorCode::invalid_argument, "empty minibatch");
  if (grad.size() != model.param_count()) fail(ErrorCode::invalid_argument, "gradient buffer size mismatch");
  MinibatchWorkspace local;
  MinibatchWorkspace& ws = workspace ? *workspace : local;
  const auto mb = static_cast<Eigen::Index>(rows.size());
  const std::size_t obs_dim = batch.states[rows[0]].size();
  const std::size_t n_head = model.space.n;
  const std::size_t n_pi = model.policy.values.size();
  const std::size_t n_ls = model.log_std.size();

  ws.x.resize(mb, static_cast<Eigen::Index>(obs_dim));
  for (Eigen::Index k = 0; k < mb; ++k) {
    const auto& s = batch.states[rows[static_cast<std::size_t>(k)]];
    if (s.size() != obs_dim) fail(ErrorCode::invalid_argument, "observation size mismatch in minibatch");
    for (std::size_t j = 0; j < obs_dim; ++j) ws.x(k, static_cast<Eigen::Index>(j)) = s[j];
  }
  const Eigen::MatrixXd out_pi = mlp_forward_batch(model.policy, ws.x, &ws.cache_pi);
  const Eigen::MatrixXd out_v = mlp_forward_batch(model.value_fn, ws.x, &ws.cache_v);

  // Only the heads go on the tape: network outputs and log_std are leaves,
  // and their adjoints are pushed through the networks by the batched backward pass.
  Tape& tape = ws.tape;
  tape.clear();
  const std::vector<Var> log_std = tape.leaves(model.log_std);
  std::vector<std::vector<Var>> heads(rows.size(), std::vector<Var>(n_head));
  std::vector<Var> values(rows.size());
  std::vector<Var> terms;
  terms.reserve(3 * rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t i = rows[k];
    const auto ki = static_cast<Eigen::Index>(k);
    for (std::size_t j = 0; j < n_head; ++j) heads[k][j] = tape.leaf(out_pi(ki, static_cast<Eigen::Index>(j)));
    values[k] = tape.leaf(out_v(ki, 0));
    const DistVar d = model.space.discrete ? DistVar::make_categorical(heads[k])
                                           : DistVar::make_gaussian(heads[k], log_std);
    terms.push_back(sample_surrogate(tape, obj, batch, i, d, penalty_alpha));
    if (entropy_coef != 0.0) terms.push_back(entropy_coef * entropy(tape, d));
    const Var err = values[k] - batch.returns[i];
    terms.push_back(-value_loss_coef * (err * err));
  }
  const Var objective = tape.sum(terms) / static_cast<double>(rows.size());
  if (!std::isfinite(objective.value())) fail(ErrorCode::numeric_error, "non-finite objective");
  tape.backward(objective);

  Eigen::MatrixXd d_pi(mb, static_cast<Eigen::Index>(n_head));
  Eigen::MatrixXd d_v(mb, 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto ki = static_cast<Eigen::Index>(k);
    for (std::size_t j = 0; j < n_head; ++j) d_pi(ki, static_cast<Eigen::Index>(j)) = tape.adjoint(heads[k][j]);
    d_v(ki, 0) = tape.adjoint(values[k]);
  }
  mlp_backward_batch(model.policy, ws.cache_pi, d_pi, grad.subspan(0, n_pi));
  for (std::size_t j = 0; j < n_ls; ++j) grad[n_pi + j] += tape.adjoint(log_std[j]);
  mlp_backward_batch(model.value_fn, ws.cache_v, d_v, grad.subspan(n_pi + n_ls));
  return objective.value();
}

namespace {

ActorCritic make_model(const TrainConfig& c, Rng& rng) {
  const auto probe = make_env(c.env);
  return ActorCritic::create(probe->observation_size(), probe->action_space(), c.hidden, c.init_log_std, rng);
}

}  // namespace

Trainer::Trainer(TrainConfig config)
    : config_((config.validate(), std::move(config))),
      rng_(config_.seed),
      model_(make_model(config_, rng_)),
      adam_(model_.param_count(), config_.learning_rate) {
  entropy_coef_ = config_.entropy_coef.value_or(model_.space.discrete ? 0.01 : 0.0);
  penalty_alpha_ = config_.objective.variant == Variant::PENALTY ? config_.objective.alpha : 0.0;
  envs_.resize(config_.n_envs);
  for (auto& slot : envs_) {
    slot.env = make_env(config_.env);
    slot.obs = slot.env->reset(rng_());
  }
}

Trainer::~Trainer() = default;

Collected Trainer::collect_rollout() {
  const std::size_t per_env = config_.timesteps_per_epoch / config_.n_envs;
  const std::size_t n_env = envs_.size();
  Collected out;
  struct Segment {
    std::vector<std::vector<double>> states;
    std::vector<Action> actions;
    std::vector<double> log_probs;
    std::vector<PolicyDist> dists;
    Rollout rollout;
  };
  std::vector<Segment> seg(n_env);
  // Environments advance in lockstep; storage is grouped per environment so
  // each segment is a contiguous trajectory for GAE.
  for (std::size_t t = 0; t < per_env; ++t) {
    for (std::size_t e = 0; e < n_env; ++e) {
      auto& slot = envs_[e];
      auto& sg = seg[e];
      PolicyDist d = model_.dist(slot.obs);
      Action a = sample(d, rng_);
      sg.log_probs.push_back(log_prob(d, a).value);
      sg.rollout.value_estimate.push_back(model_.value(slot.obs));
      sg.states.push_back(slot.obs);
      const StepResult r = slot.env->step(a);
      sg.actions.push_back(std::move(a));
      sg.dists.push_back(std::move(d));
      sg.rollout.reward.push_back(r.reward);
      sg.rollout.done.push_back(r.done);
      slot.episode_return += r.reward;
      if (r.done) {
        out.episode_returns.push_back(slot.episode_return);
        slot.episode_return = 0.0;
        slot.obs = slot.env->reset(rng_());
      } else {
        slot.obs = r.observation;
      }
    }
  }
  SampleBatch& b = out.batch;
  for (std::size_t e = 0; e < n_env; ++e) {
    auto& sg = seg[e];
    sg.rollout.bootstrap_value = sg.rollout.done.back() ? 0.0 : model_.value(envs_[e].obs);
    const auto adv = compute_gae(sg.rollout, config_.gamma, config_.lambda);
    const auto ret = compute_returns(adv, sg.rollout.value_estimate);
    for (std::size_t t = 0; t < per_env; ++t) {
      b.states.push_back(std::move(sg.states[t]));
      b.actions.push_back(std::move(sg.actions[t]));
      b.old_log_prob.push_back(sg.log_probs[t]);
      b.old_dist.push_back(std::move(sg.dists[t]));
      b.values.push_back(sg.rollout.value_estimate[t]);
      b.returns.push_back(ret[t]);
      out.raw_advantage.push_back(adv[t]);
    }
  }
  b.advantage = out.raw_advantage;
  normalize_advantages(b.advantage);
  return out;
}

EpochMetrics Trainer::train_epoch(const Collected& data) {
  const SampleBatch& batch = data.batch;
  const std::size_t n = batch.size();
  if (n == 0) fail(ErrorCode::invalid_argument, "empty batch");
  const ObjectiveConfig obj = config_.objective_at(epoch_);
  const std::size_t mb = config_.minibatch_size;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> params = model_.flat();
  std::vector<double> grad(params.size());
  MinibatchWorkspace ws;
  double loss_sum = 0.0;
  std::size_t n_updates = 0;

  for (std::size_t pass = 0; pass < config_.optimization_epochs; ++pass) {
    std::shuffle(order.begin(), order.end(), rng_);
    for (std::size_t start = 0; start + mb <= n; start += mb) {
      const auto rows = std::span<const std::size_t>(order).subspan(start, mb);
      std::fill(grad.begin(), grad.end(), 0.0);
      double value = 0.0;
      try {
        value = minibatch_gradient(model_, obj, batch, rows, entropy_coef_, config_.value_loss_coef, penalty_alpha_,
                                   grad, &ws);
      } catch (const Error& e) {
        double worst = 0.0;
        for (double p : params) worst = std::max(worst, std::abs(p));
        std::ostringstream msg;
        msg << e.what() << " at epoch " << epoch_ << ", pass " << pass << ", minibatch " << start / mb
            << " (max |param| = " << worst << ")";
        fail(e.code(), msg.str());
      }
      adam_.ascend(params, grad);
      model_.set_flat(params);
      loss_sum += -value;
      ++n_updates;
    }
  }

  std::vector<PolicyDist> new_dists;
  new_dists.reserve(n);
  for (const auto& s : batch.states) new_dists.push_back(model_.dist(s));
  const DiagnosticsFragment diag = epoch_diagnostics(obj, batch, new_dists);

  EpochMetrics m;
  m.epoch = epoch_;
  m.timesteps = (epoch_ + 1) * config_.timesteps_per_epoch;
  if (!data.episode_returns.empty()) {
    last_reward_ = std::accumulate(data.episode_returns.begin(), data.episode_returns.end(), 0.0) /
                   static_cast<double>(data.episode_returns.size());
  }
  m.mean_episode_reward = last_reward_;
  m.clipfrac = diag.clipfrac;
  m.max_ratio = diag.max_ratio;
  m.max_kl = diag.max_kl;
  m.mean_kl = diag.mean_kl;
  m.entropy = diag.entropy;
  m.unimproved_frac = diag.unimproved_frac;
  m.loss = n_updates ? loss_sum / static_cast<double>(n_updates) : 0.0;
  m.penalty_alpha = penalty_alpha_;
  if (obj.variant == Variant::PENALTY) {
    penalty_alpha_ = adapt_penalty_coef(penalty_alpha_, diag.mean_kl, obj.penalty_target, obj.penalty_adapt_factor);
  }
  ++epoch_;
  history_.push_back(m);
  return m;
}

EpochMetrics Trainer::step() {
  const Collected data = collect_rollout();
  return train_epoch(data);
}

std::vector<EpochMetrics> Trainer::run() {
  while (!finished()) step();
  return history_;
}

std::vector<EpochMetrics> run(const TrainConfig& config) {
  Trainer t(config);
  return t.run();
}

}  // namespace proxlab
