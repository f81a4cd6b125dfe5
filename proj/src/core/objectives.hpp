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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/autodiff.hpp"
#include "core/distributions.hpp"
#include "core/tracked.hpp"

namespace proxlab {

enum class Variant { PG, CLIP, CLIP_SIMPLE, RB, TR, TR_SIMPLE, TRULY, TR_RB_RATIO, PENALTY };

const char* to_string(Variant v);
/// Case-insensitive; accepts the enumerator names plus "ppo" for CLIP and
/// "ppo_simple"/"tr_ppo" style aliases. Returns nullopt on no match.
std::optional<Variant> parse_variant(std::string_view name);

/// Whether the variant's trigger is the KL trust region rather than the ratio range.
bool is_trust_region(Variant v);
bool uses_kl(Variant v);

struct ObjectiveConfig {
  Variant variant = Variant::CLIP;
  double epsilon = 0.2;
  double delta = 0.035;
  double alpha = 0.3;
  double penalty_target = 0.01;
  double penalty_adapt_factor = 2.0;

  /// Throws invalid-argument when a field needed by the variant is out of range.
  void validate() const;
};

// Per-sample surrogates. T is double or Var; A is a constant. The improvement
// condition r*A >= r_old*A uses r_old = 1 (samples come from the old policy).

namespace detail {
inline double constant_like(double, double c) { return c; }
inline Var constant_like(Var like, double c) { return like.tape()->leaf(c); }
}  // namespace detail

template <class T>
T l_pg(T r, double A) {
  return r * A;
}

template <class T>
T f_clip(T r, double eps) {
  return clip_range(r, 1.0 - eps, 1.0 + eps);
}

template <class T>
T l_clip(T r, double A, double eps) {
  return min2(r * A, f_clip(r, eps) * A);
}

/// Rollback function: identity inside [1-eps, 1+eps], slope -alpha outside,
/// continuous at both breakpoints. The breakpoints themselves take the
/// interior branch.
template <class T>
T f_rb(T r, double eps, double alpha) {
  const double rv = value_of(r);
  if (rv < 1.0 - eps) return -alpha * r + (1.0 + alpha) * (1.0 - eps);
  if (rv > 1.0 + eps) return -alpha * r + (1.0 + alpha) * (1.0 + eps);
  return r;
}

template <class T>
T l_rb(T r, double A, double eps, double alpha) {
  return min2(r * A, f_rb(r, eps, alpha) * A);
}

/// Ratio is replaced by r_old = 1 once the state's KL reaches delta.
template <class T>
T l_tr(T r, double A, double kl, double delta) {
  if (kl >= delta) return min2(r * A, detail::constant_like(r, A));
  return r * A;
}

template <class T, class K>
T l_truly(T r, double A, K kl, double delta, double alpha) {
  const double rv = value_of(r);
  if (value_of(kl) >= delta && rv * A >= A) return r * A - alpha * kl;
  return r * A - delta;
}

template <class T>
T l_tr_rb_ratio(T r, double A, double kl, double delta, double alpha) {
  const double rv = value_of(r);
  if (kl >= delta && rv * A >= A) return -alpha * r * A;
  return r * A;
}

template <class T, class K>
T l_penalty(T r, double A, K kl, double alpha_live) {
  return r * A - alpha_live * kl;
}

template <class T>
T l_clip_simple(T r, double A, double eps) {
  return f_clip(r, eps) * A;
}

template <class T>
T l_tr_simple(T r, double A, double kl, double delta) {
  if (kl >= delta) return detail::constant_like(r, A);
  return r * A;
}

/// Dispatch on the configured variant. `alpha_live` is used by PENALTY only.
template <class T, class K>
T sample_objective(const ObjectiveConfig& c, T r, double A, K kl, double alpha_live) {
  const double klv = value_of(kl);
  switch (c.variant) {
    case Variant::PG: return l_pg(r, A);
    case Variant::CLIP: return l_clip(r, A, c.epsilon);
    case Variant::CLIP_SIMPLE: return l_clip_simple(r, A, c.epsilon);
    case Variant::RB: return l_rb(r, A, c.epsilon, c.alpha);
    case Variant::TR: return l_tr(r, A, klv, c.delta);
    case Variant::TR_SIMPLE: return l_tr_simple(r, A, klv, c.delta);
    case Variant::TRULY: return l_truly(r, A, kl, c.delta, c.alpha);
    case Variant::TR_RB_RATIO: return l_tr_rb_ratio(r, A, klv, c.delta, c.alpha);
    case Variant::PENALTY: return l_penalty(r, A, kl, alpha_live);
  }
  return l_pg(r, A);
}

/// Multiply by factor above 1.5*target, divide below target/1.5, clamp to [1e-4, 1e4].
double adapt_penalty_coef(double alpha_live, double measured_kl, double target, double factor);

struct SampleBatch {
  std::vector<std::vector<double>> states;
  std::vector<Action> actions;
  std::vector<double> old_log_prob;
  std::vector<double> advantage;
  std::vector<double> returns;
  std::vector<double> values;  // value estimates at collection time; may be empty
  std::vector<PolicyDist> old_dist;

  std::size_t size() const { return actions.size(); }
  /// Lengths agree and each old_log_prob matches old_dist at its action within 1e-9.
  void validate() const;
};

/// Zero mean, unit (population) variance. Leaves a constant vector at zero.
void normalize_advantages(std::span<double> adv);

/// Maps a state to the tape-tracked policy distribution at that state.
using PolicyForward = std::function<DistVar(Tape&, std::span<const double>)>;

/// Surrogate of sample i given the tape-tracked current policy at its state.
Var sample_surrogate(Tape& tape, const ObjectiveConfig& config, const SampleBatch& batch, std::size_t i,
                     const DistVar& dist, double penalty_alpha = 1.0);

/// Mean per-sample surrogate over `indices` (all samples when empty) plus
/// entropy_coef times mean entropy. Builds on the caller's tape.
Var batch_objective(Tape& tape, const ObjectiveConfig& config, const SampleBatch& batch,
                    const PolicyForward& policy, double entropy_coef = 0.0,
                    double penalty_alpha = 1.0, std::span<const std::size_t> indices = {});

/// Plain evaluation of the same quantity from explicit per-sample ratios and KLs.
double batch_objective_value(const ObjectiveConfig& config, std::span<const double> ratios,
                             std::span<const double> advantages, std::span<const double> kls,
                             double penalty_alpha = 1.0);

struct PerSampleDiagnostics {
  double ratio = 1.0;
  double kl = 0.0;
  bool clipped = false;       // trigger active and objective improved (constant branch)
  bool improved = true;       // r*A >= r_old*A
  bool out_of_range = false;  // |r-1| >= eps, or kl >= delta for trust-region variants
};

PerSampleDiagnostics sample_diagnostics(const ObjectiveConfig& config, double ratio, double A,
                                        double kl);

struct DiagnosticsFragment {
  double clipfrac = 0.0;
  double max_ratio = 1.0;
  double max_kl = 0.0;
  double mean_kl = 0.0;
  double entropy = 0.0;
  double unimproved_frac = 0.0;
};

/// Compares the end-of-epoch policy (new_dists, one per sample) against the
/// snapshots stored in the batch. clipfrac always uses the ratio range.
DiagnosticsFragment epoch_diagnostics(const ObjectiveConfig& config, const SampleBatch& batch,
                                      std::span<const PolicyDist> new_dists);

}  // namespace proxlab
