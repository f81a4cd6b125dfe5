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
#include "core/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "core/error.hpp"

namespace proxlab {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::PG: return "PG";
    case Variant::CLIP: return "CLIP";
    case Variant::CLIP_SIMPLE: return "CLIP_SIMPLE";
    case Variant::RB: return "RB";
    case Variant::TR: return "TR";
    case Variant::TR_SIMPLE: return "TR_SIMPLE";
    case Variant::TRULY: return "TRULY";
    case Variant::TR_RB_RATIO: return "TR_RB_RATIO";
    case Variant::PENALTY: return "PENALTY";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  std::string key;
  for (char ch : name) key.push_back(ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  static const std::pair<const char*, Variant> table[] = {
      {"PG", Variant::PG},
      {"CLIP", Variant::CLIP},
      {"PPO", Variant::CLIP},
      {"CLIP_SIMPLE", Variant::CLIP_SIMPLE},
      {"PPO_SIMPLE", Variant::CLIP_SIMPLE},
      {"RB", Variant::RB},
      {"PPO_RB", Variant::RB},
      {"TR", Variant::TR},
      {"TR_PPO", Variant::TR},
      {"TR_SIMPLE", Variant::TR_SIMPLE},
      {"TR_PPO_SIMPLE", Variant::TR_SIMPLE},
      {"TRULY", Variant::TRULY},
      {"TR_PPO_RB", Variant::TRULY},
      {"TR_RB_RATIO", Variant::TR_RB_RATIO},
      {"PENALTY", Variant::PENALTY},
      {"PPO_PENALTY", Variant::PENALTY},
  };
  for (const auto& [n, v] : table) {
    if (key == n) return v;
  }
  return std::nullopt;
}

bool is_trust_region(Variant v) {
  return v == Variant::TR || v == Variant::TR_SIMPLE || v == Variant::TRULY || v == Variant::TR_RB_RATIO;
}

bool uses_kl(Variant v) { return is_trust_region(v) || v == Variant::PENALTY; }

void ObjectiveConfig::validate() const {
  const bool ratio_family = variant == Variant::CLIP || variant == Variant::CLIP_SIMPLE || variant == Variant::RB;
  if (ratio_family && !(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorCode::invalid_argument, "epsilon must lie in (0, 1)");
  }
  if (is_trust_region(variant) && !(delta > 0.0 && std::isfinite(delta))) {
    fail(ErrorCode::invalid_argument, "delta must be positive");
  }
  const bool needs_alpha = variant == Variant::RB || variant == Variant::TRULY ||
                           variant == Variant::TR_RB_RATIO || variant == Variant::PENALTY;
  if (needs_alpha && !(alpha > 0.0 && std::isfinite(alpha))) {
    fail(ErrorCode::invalid_argument, "alpha must be positive");
  }
  if (variant == Variant::PENALTY) {
    if (!(penalty_target > 0.0)) fail(ErrorCode::invalid_argument, "penalty_target must be positive");
    if (!(penalty_adapt_factor > 1.0)) fail(ErrorCode::invalid_argument, "penalty_adapt_factor must exceed 1");
  }
}

double adapt_penalty_coef(double alpha_live, double measured_kl, double target, double factor) {
  double a = alpha_live;
  if (measured_kl > 1.5 * target) {
    a *= factor;
  } else if (measured_kl < target / 1.5) {
    a /= factor;
  }
  return std::clamp(a, 1e-4, 1e4);
}

void SampleBatch::validate() const {
  const std::size_t n = actions.size();
  if (states.size() != n || old_log_prob.size() != n || advantage.size() != n || returns.size() != n ||
      old_dist.size() != n || (!values.empty() && values.size() != n)) {
    fail(ErrorCode::invalid_argument, "sample batch fields have different lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double lp = log_prob(old_dist[i], actions[i]).value;
    if (!(std::abs(lp - old_log_prob[i]) <= 1e-9)) {
      fail(ErrorCode::invalid_argument, "old_log_prob disagrees with old_dist at sample " + std::to_string(i));
    }
  }
}

void normalize_advantages(std::span<double> adv) {
  if (adv.empty()) return;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double sd = std::sqrt(var);
  for (double& a : adv) a = sd > 0.0 ? (a - mean) / (sd + 1e-8) : 0.0;
}

Var sample_surrogate(Tape& tape, const ObjectiveConfig& config, const SampleBatch& batch, std::size_t i,
                     const DistVar& dist, double penalty_alpha) {
  const Var r = exp(log_prob(tape, dist, batch.actions[i]) - batch.old_log_prob[i]);
  const double A = batch.advantage[i];
  if (uses_kl(config.variant)) {
    return sample_objective(config, r, A, kl(tape, batch.old_dist[i], dist), penalty_alpha);
  }
  return sample_objective(config, r, A, 0.0, penalty_alpha);
}

Var batch_objective(Tape& tape, const ObjectiveConfig& config, const SampleBatch& batch,
                    const PolicyForward& policy, double entropy_coef, double penalty_alpha,
                    std::span<const std::size_t> indices) {
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all.resize(batch.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    indices = all;
  }
  if (indices.empty()) fail(ErrorCode::invalid_argument, "empty batch");
  std::vector<Var> terms;
  terms.reserve(indices.size() * 2);
  for (std::size_t i : indices) {
    if (i >= batch.size()) fail(ErrorCode::invalid_argument, "sample index out of range");
    const DistVar d = policy(tape, batch.states[i]);
    terms.push_back(sample_surrogate(tape, config, batch, i, d, penalty_alpha));
    if (entropy_coef != 0.0) terms.push_back(entropy_coef * entropy(tape, d));
  }
  const Var total = tape.sum(terms) / static_cast<double>(indices.size());
  if (!std::isfinite(total.value())) fail(ErrorCode::numeric_error, "non-finite batch objective");
  return total;
}

double batch_objective_value(const ObjectiveConfig& config, std::span<const double> ratios,
                             std::span<const double> advantages, std::span<const double> kls,
                             double penalty_alpha) {
  if (ratios.empty()) fail(ErrorCode::invalid_argument, "empty batch");
  if (advantages.size() != ratios.size() || (!kls.empty() && kls.size() != ratios.size())) {
    fail(ErrorCode::invalid_argument, "per-sample arrays have different lengths");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double k = kls.empty() ? 0.0 : kls[i];
    total += sample_objective(config, ratios[i], advantages[i], k, penalty_alpha);
  }
  return total / static_cast<double>(ratios.size());
}

PerSampleDiagnostics sample_diagnostics(const ObjectiveConfig& config, double ratio, double A, double kl) {
  PerSampleDiagnostics d;
  d.ratio = ratio;
  d.kl = kl;
  d.improved = ratio * A >= A;
  d.out_of_range = is_trust_region(config.variant) ? kl >= config.delta
                                                  : std::abs(ratio - 1.0) >= config.epsilon;
  d.clipped = d.out_of_range && d.improved;
  return d;
}

DiagnosticsFragment epoch_diagnostics(const ObjectiveConfig& config, const SampleBatch& batch,
                                      std::span<const PolicyDist> new_dists) {
  const std::size_t n = batch.size();
  if (new_dists.size() != n) fail(ErrorCode::invalid_argument, "need one new distribution per sample");
  DiagnosticsFragment f;
  if (n == 0) return f;
  std::size_t n_clip = 0;
  std::size_t n_unimproved = 0;
  double max_ratio = 0.0;
  double max_kl = 0.0;
  double sum_kl = 0.0;
  double sum_ent = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ratio(log_prob(new_dists[i], batch.actions[i]), LogProb{batch.old_log_prob[i]});
    const double k = kl(batch.old_dist[i], new_dists[i]);
    const auto d = sample_diagnostics(config, r, batch.advantage[i], k);
    if (std::abs(r - 1.0) >= config.epsilon) ++n_clip;
    if (!d.improved && d.out_of_range) ++n_unimproved;
    max_ratio = std::max(max_ratio, r);
    max_kl = std::max(max_kl, k);
    sum_kl += k;
    sum_ent += entropy(new_dists[i]);
  }
  const double dn = static_cast<double>(n);
  f.clipfrac = static_cast<double>(n_clip) / dn;
  f.unimproved_frac = static_cast<double>(n_unimproved) / dn;
  f.max_ratio = max_ratio;
  f.max_kl = max_kl;
  f.mean_kl = sum_kl / dn;
  f.entropy = sum_ent / dn;
  return f;
}

}  // namespace proxlab
