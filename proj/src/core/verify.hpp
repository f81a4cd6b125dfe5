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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/autodiff.hpp"
#include "core/oracle.hpp"

namespace proxlab {

/// Deliberate defects injected into the clipped surrogates, used to show the
/// checks can fail.
enum class Mutation { none, rollback_slope, drop_min };

const char* to_string(Mutation m);
std::optional<Mutation> parse_mutation(std::string_view name);

/// The clipped and rollback surrogates as seen by the checks.
struct SurrogateSet {
  std::function<double(double, double, double)> clip;  // (r, A, eps)
  std::function<Var(Var, double, double)> clip_var;
  std::function<double(double, double, double)> rollback;  // f_rb(r, eps, alpha)
  std::function<double(double, double, double, double)> rb;  // (r, A, eps, alpha)
  std::function<Var(Var, double, double, double)> rb_var;
};

SurrogateSet surrogates(Mutation m);

struct CheckLine {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
};

struct VerifyOptions {
  Mutation mutation = Mutation::none;
  std::uint64_t seed = 20260101;
  std::size_t gradient_points = 100;
  std::size_t bound_instances = 1000;
  std::size_t triples = 100000;
  std::size_t monotonic_instances = 50;
  std::size_t monotonic_inconclusive_allowed = 5;
  double monotonic_delta = 1e-3;
};

struct VerifyReport {
  std::vector<CheckLine> lines;

  std::size_t failures() const;
  std::string text() const;
};

// Individual checks; each returns one report line.
CheckLine check_gradients(const VerifyOptions& o);
CheckLine check_theorem_1_bound(const VerifyOptions& o);
CheckLine check_clip_case_form(const VerifyOptions& o);
CheckLine check_clip_lower_bound(const VerifyOptions& o);
CheckLine check_clip_improvement_condition(const VerifyOptions& o);
CheckLine check_rollback_continuity(const VerifyOptions& o);
CheckLine check_rollback_slope(const VerifyOptions& o);
CheckLine check_penalty_monotone(const VerifyOptions& o);
CheckLine check_theorem_2_outward_push(const VerifyOptions& o);
CheckLine check_theorem_3_categorical(const VerifyOptions& o);
CheckLine check_theorem_3_gaussian(const VerifyOptions& o);
CheckLine check_theorem_4_rollback_vs_clip(const VerifyOptions& o);
CheckLine check_theorem_5_containment(const VerifyOptions& o);
CheckLine check_theorem_6_monotonic(const VerifyOptions& o);

/// Runs every check in a fixed order.
VerifyReport run_verify(const VerifyOptions& options);

/// Per-variant worst relative gradient error over random non-kink points.
struct GradientSweep {
  std::string variant;
  double worst_error = 0.0;
  std::size_t points = 0;
};
std::vector<GradientSweep> gradient_sweep(std::size_t points, std::uint64_t seed);

struct MonotonicSweep {
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t inconclusive = 0;
  double worst_gap = 0.0;  // min over instances of eta_new - eta_old
};
MonotonicSweep monotonic_sweep(std::size_t instances, double delta, std::uint64_t seed);

}  // namespace proxlab
