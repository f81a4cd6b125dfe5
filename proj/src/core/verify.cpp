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
#include "core/verify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/envs.hpp"
#include "core/error.hpp"
#include "core/metrics_io.hpp"
#include "core/mlp.hpp"
#include "core/objectives.hpp"
#include "core/tracked.hpp"

namespace proxlab {

const char* to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::rollback_slope: return "rollback_slope";
    case Mutation::drop_min: return "drop_min";
  }
  return "?";
}

std::optional<Mutation> parse_mutation(std::string_view name) {
  if (name == "none") return Mutation::none;
  if (name == "rollback_slope") return Mutation::rollback_slope;
  if (name == "drop_min") return Mutation::drop_min;
  return std::nullopt;
}

namespace {

// Rollback with the slope sign flipped outside the range (still continuous).
template <class T>
T f_rb_flipped(T r, double eps, double alpha) {
  const double rv = value_of(r);
  if (rv < 1.0 - eps) return alpha * r + (1.0 - alpha) * (1.0 - eps);
  if (rv > 1.0 + eps) return alpha * r + (1.0 - alpha) * (1.0 + eps);
  return r;
}

std::string fmt(double x) { return format_double(x); }

CheckLine line(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)};
}

}  // namespace

SurrogateSet surrogates(Mutation m) {
  SurrogateSet s;
  if (m == Mutation::drop_min) {
    s.clip = [](double r, double A, double eps) { return l_clip_simple(r, A, eps); };
    s.clip_var = [](Var r, double A, double eps) { return l_clip_simple(r, A, eps); };
  } else {
    s.clip = [](double r, double A, double eps) { return l_clip(r, A, eps); };
    s.clip_var = [](Var r, double A, double eps) { return l_clip(r, A, eps); };
  }
  if (m == Mutation::rollback_slope) {
    s.rollback = [](double r, double eps, double alpha) { return f_rb_flipped(r, eps, alpha); };
    s.rb = [](double r, double A, double eps, double alpha) {
      return min2(r * A, f_rb_flipped(r, eps, alpha) * A);
    };
    s.rb_var = [](Var r, double A, double eps, double alpha) {
      return min2(r * A, f_rb_flipped(r, eps, alpha) * A);
    };
  } else {
    s.rollback = [](double r, double eps, double alpha) { return f_rb(r, eps, alpha); };
    s.rb = [](double r, double A, double eps, double alpha) { return l_rb(r, A, eps, alpha); };
    s.rb_var = [](Var r, double A, double eps, double alpha) { return l_rb(r, A, eps, alpha); };
  }
  return s;
}

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(lines.begin(), lines.end(), [](const CheckLine& l) { return l.status == CheckStatus::fail; }));
}

std::string VerifyReport::text() const {
  std::string out;
  for (const auto& l : lines) out += l.name + " " + to_string(l.status) + " " + l.detail + "\n";
  return out;
}

// Gradients ------------------------------------------------------------------

namespace {

struct GradientCase {
  MlpParams net;
  std::vector<double> point;  // net values, then log_std when continuous
  bool categorical = true;
  SampleBatch batch;
};

constexpr std::size_t kGaussDim = 2;

// Builds one random batch: old policy at a random parameter vector, the point
// of evaluation a perturbation of it. Returns nullopt when some sample sits
// within 1e-3 of a branch switch.
std::optional<GradientCase> make_gradient_case(const ObjectiveConfig& cfg, bool categorical, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  GradientCase gc;
  gc.categorical = categorical;
  const std::size_t out = categorical ? 3 : kGaussDim;
  const MlpParams old_net = mlp_init({3, 4, out}, rng, 1.0);
  std::vector<double> old_log_std;
  if (!categorical) old_log_std = {0.3 * normal(rng), 0.3 * normal(rng)};
  gc.net = old_net;
  for (double& v : gc.net.values) v += 0.3 * normal(rng);
  std::vector<double> log_std = old_log_std;
  for (double& v : log_std) v += 0.2 * normal(rng);
  gc.point = gc.net.values;
  gc.point.insert(gc.point.end(), log_std.begin(), log_std.end());

  auto dist_at = [&](const MlpParams& net, const std::vector<double>& ls, const std::vector<double>& s) -> PolicyDist {
    const auto head = mlp_eval(net, s);
    if (categorical) return CategoricalDist{head};
    return GaussianDist{head, ls};
  };
  SampleBatch& b = gc.batch;
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> s{normal(rng), normal(rng), normal(rng)};
    PolicyDist d_old = dist_at(old_net, old_log_std, s);
    Action a = sample(d_old, rng);
    const double lp_old = log_prob(d_old, a).value;
    const PolicyDist d_new = dist_at(gc.net, log_std, s);
    const double r = std::exp(log_prob(d_new, a).value - lp_old);
    const double k = kl(d_old, d_new);
    const double margin = std::min({std::abs(r - (1.0 - cfg.epsilon)), std::abs(r - (1.0 + cfg.epsilon)),
                                    std::abs(r - 1.0), std::abs(k - cfg.delta)});
    if (margin < 1e-3) return std::nullopt;
    b.states.push_back(std::move(s));
    b.actions.push_back(std::move(a));
    b.old_log_prob.push_back(lp_old);
    b.advantage.push_back(normal(rng));
    b.returns.push_back(0.0);
    b.old_dist.push_back(std::move(d_old));
  }
  return gc;
}

double gradient_error(const ObjectiveConfig& cfg, const GradientCase& gc) {
  const std::size_t n_net = gc.net.values.size();
  const TapeFunction f = [&](Tape& tape, std::span<const Var> p) {
    const auto net_leaves = p.subspan(0, n_net);
    const std::vector<Var> log_std(p.begin() + static_cast<std::ptrdiff_t>(n_net), p.end());
    const PolicyForward forward = [&](Tape& t, std::span<const double> s) {
      auto head = mlp_forward(t, gc.net, net_leaves, s);
      return gc.categorical ? DistVar::make_categorical(std::move(head))
                            : DistVar::make_gaussian(std::move(head), log_std);
    };
    return batch_objective(tape, cfg, gc.batch, forward, 0.01, 2.0);
  };
  return finite_diff_check(f, gc.point);
}

ObjectiveConfig default_objective(Variant v) {
  ObjectiveConfig c;
  c.variant = v;
  if (v == Variant::TRULY || v == Variant::TR_RB_RATIO) {
    c.delta = 0.03;
    c.alpha = 5.0;
  }
  return c;
}

}  // namespace

std::vector<GradientSweep> gradient_sweep(std::size_t points, std::uint64_t seed) {
  const Variant all[] = {Variant::PG, Variant::CLIP, Variant::CLIP_SIMPLE, Variant::RB, Variant::TR,
                         Variant::TR_SIMPLE, Variant::TRULY, Variant::TR_RB_RATIO, Variant::PENALTY};
  std::vector<GradientSweep> out;
  Rng rng(seed);
  for (Variant v : all) {
    const ObjectiveConfig cfg = default_objective(v);
    GradientSweep g;
    g.variant = to_string(v);
    while (g.points < points) {
      const auto gc = make_gradient_case(cfg, g.points % 2 == 0, rng);
      if (!gc) continue;
      g.worst_error = std::max(g.worst_error, gradient_error(cfg, *gc));
      ++g.points;
    }
    out.push_back(g);
  }
  return out;
}

CheckLine check_gradients(const VerifyOptions& o) {
  const auto sweep = gradient_sweep(o.gradient_points, o.seed);
  double worst = 0.0;
  std::string detail;
  for (const auto& g : sweep) {
    worst = std::max(worst, g.worst_error);
    detail += g.variant + "=" + fmt(g.worst_error) + " ";
  }
  return line("gradient_check", worst <= 1e-4, "max_rel_err=" + fmt(worst) + " " + detail);
}

// Improvement lower bound --------------------------------------------------

CheckLine check_theorem_1_bound(const VerifyOptions& o) {
  Rng rng(o.seed + 1);
  std::uniform_int_distribution<std::size_t> ns(2, 5);
  std::uniform_int_distribution<std::size_t> na(2, 3);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  double worst_gap = std::numeric_limits<double>::infinity();  // min eta - M
  double worst_touch = 0.0;                                     // max |M(old) - eta(old)|
  for (std::size_t k = 0; k < o.bound_instances; ++k) {
    const auto mdp = random_mdp(ns(rng), na(rng), rng, 0.9);
    const auto old_pi = random_policy_table(mdp.n_states, mdp.n_actions, rng);
    const double t = mix(rng);
    const PolicyTable new_pi = (1.0 - t) * old_pi + t * random_policy_table(mdp.n_states, mdp.n_actions, rng);
    const double eta_new = exact_eval(mdp, new_pi).eta;
    const double eta_old = exact_eval(mdp, old_pi).eta;
    worst_gap = std::min(worst_gap, eta_new - lower_bound_M(mdp, old_pi, new_pi).M);
    worst_touch = std::max(worst_touch, std::abs(lower_bound_M(mdp, old_pi, old_pi).M - eta_old));
  }
  return line("theorem_1_bound", worst_gap >= -1e-9 && worst_touch <= 1e-9,
              "instances=" + std::to_string(o.bound_instances) + " min(eta-M)=" + fmt(worst_gap) +
                  " max|M(old)-eta(old)|=" + fmt(worst_touch));
}

// Clipping identities ----------------------------------------------------------

namespace {

struct Triple {
  double r, A, eps;
};

std::vector<Triple> random_triples(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> ur(0.05, 2.5);
  std::normal_distribution<double> ua(0.0, 2.0);
  std::uniform_real_distribution<double> ue(0.01, 0.5);
  std::vector<Triple> t(n);
  for (auto& x : t) x = {ur(rng), ua(rng), ue(rng)};
  return t;
}

}  // namespace

CheckLine check_clip_case_form(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  std::size_t mismatches = 0;
  for (const auto& [r, A, eps] : random_triples(o.triples, o.seed + 2)) {
    double cases = r * A;
    if (A >= 0.0 && r >= 1.0 + eps) cases = (1.0 + eps) * A;
    if (A < 0.0 && r <= 1.0 - eps) cases = (1.0 - eps) * A;
    if (s.clip(r, A, eps) != cases) ++mismatches;
  }
  return line("clip_case_form", mismatches == 0,
              "triples=" + std::to_string(o.triples) + " mismatches=" + std::to_string(mismatches));
}

CheckLine check_clip_lower_bound(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  std::size_t violations = 0;
  for (const auto& [r, A, eps] : random_triples(o.triples, o.seed + 3)) {
    if (s.clip(r, A, eps) > r * A) ++violations;
  }
  return line("clip_lower_bound", violations == 0,
              "triples=" + std::to_string(o.triples) + " violations=" + std::to_string(violations));
}

CheckLine check_clip_improvement_condition(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  std::size_t mismatches = 0;
  const std::size_t n = std::min<std::size_t>(o.triples, 20000);
  for (const auto& [r, A, eps] : random_triples(n, o.seed + 4)) {
    Tape tape;
    const Var rv = tape.leaf(r);
    const Var out = s.clip_var(rv, A, eps);
    const Var wrt[] = {rv};
    const bool constant = tape.gradient(out, wrt)[0] == 0.0;
    const bool predicted = std::abs(r - 1.0) >= eps && r * A >= A;
    if (constant != predicted) ++mismatches;
  }
  return line("clip_improvement_condition", mismatches == 0,
              "points=" + std::to_string(n) + " mismatches=" + std::to_string(mismatches));
}

CheckLine check_rollback_continuity(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  Rng rng(o.seed + 5);
  std::uniform_real_distribution<double> ue(0.05, 0.5);
  std::uniform_real_distribution<double> ua(0.01, 10.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double eps = ue(rng);
    const double alpha = ua(rng);
    for (double b : {1.0 - eps, 1.0 + eps}) {
      const double tau = 1e-14;
      const double left = s.rollback(b - tau, eps, alpha);
      const double right = s.rollback(b + tau, eps, alpha);
      worst = std::max({worst, std::abs(left - s.rollback(b, eps, alpha)), std::abs(right - s.rollback(b, eps, alpha))});
    }
  }
  return line("rollback_continuity", worst <= 1e-12, "max_jump=" + fmt(worst));
}

CheckLine check_rollback_slope(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  Rng rng(o.seed + 6);
  std::uniform_real_distribution<double> ue(0.05, 0.4);
  std::uniform_real_distribution<double> ua(0.01, 10.0);
  std::uniform_real_distribution<double> uA(0.1, 3.0);
  std::uniform_real_distribution<double> over(1e-3, 1.5);
  double worst_rb = 0.0;
  double worst_clip = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double eps = ue(rng);
    const double alpha = ua(rng);
    const double A = uA(rng);
    const double r = 1.0 + eps + over(rng);
    Tape tape;
    const Var rv = tape.leaf(r);
    const Var wrt[] = {rv};
    const double g_rb = tape.gradient(s.rb_var(rv, A, eps, alpha), wrt)[0];
    const double g_clip = tape.gradient(s.clip_var(rv, A, eps), wrt)[0];
    worst_rb = std::max(worst_rb, std::abs(g_rb + alpha * A) / std::max(1.0, alpha * A));
    worst_clip = std::max(worst_clip, std::abs(g_clip));
  }
  return line("rollback_slope", worst_rb <= 1e-12 && worst_clip == 0.0,
              "max_rel_err(dRB/dr+alpha*A)=" + fmt(worst_rb) + " max|dCLIP/dr|=" + fmt(worst_clip));
}

CheckLine check_penalty_monotone(const VerifyOptions& o) {
  Rng rng(o.seed + 7);
  std::uniform_real_distribution<double> u(-6.0, 2.0);
  std::size_t violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const double alpha = std::pow(10.0, u(rng));
    const double target = std::pow(10.0, u(rng) - 1.0);
    const double k1 = std::pow(10.0, u(rng));
    const double k2 = std::pow(10.0, u(rng));
    const double lo = std::min(k1, k2);
    const double hi = std::max(k1, k2);
    if (adapt_penalty_coef(alpha, hi, target, 2.0) < adapt_penalty_coef(alpha, lo, target, 2.0)) ++violations;
  }
  return line("penalty_adaptation_monotone", violations == 0, "violations=" + std::to_string(violations));
}

// Witnesses ------------------------------------------------------------------

CheckLine check_theorem_2_outward_push(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  const double eps = 0.2;
  const OutwardPushWitness w = outward_push_witness(eps);
  const TapeSurrogate clip = [&](Var r, double A) { return s.clip_var(r, A, eps); };
  const double g = w.objective_grad(clip, w.theta0);
  const double alignment = g * w.ratio_grad(0, w.theta0) * w.advantage[0];
  const double before = std::abs(w.ratio(0, w.theta0) - 1.0);
  const double after = std::abs(w.ratio(0, w.step(clip, w.beta_bar / 2.0)) - 1.0);
  return line("theorem_2_outward_push", alignment > 0.0 && after > before,
              "alignment=" + fmt(alignment) + " |r1-1| before=" + fmt(before) + " after=" + fmt(after) +
                  " beta=" + fmt(w.beta_bar / 2.0));
}

CheckLine check_theorem_3_categorical(const VerifyOptions&) {
  const std::vector<double> p_old{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const auto w = unbounded_kl_witness(p_old, 0, 0.2, 10.0);
  return line("theorem_3_categorical", std::abs(w.ratio - 1.0) <= 0.2 && w.kl > 10.0,
              "ratio=" + fmt(w.ratio) + " kl=" + fmt(w.kl) + " p_zeroed=" + fmt(w.p_new[w.zeroed]));
}

CheckLine check_theorem_3_gaussian(const VerifyOptions&) {
  const GaussianDist old_dist{{0.0}, {0.0}};
  const auto w = unbounded_kl_witness(old_dist, 0.0, 0.2, 10.0);
  return line("theorem_3_gaussian", std::abs(w.ratio - 1.0) <= 0.2 && w.kl > 10.0,
              "ratio=" + fmt(w.ratio) + " kl=" + fmt(w.kl) + " sigma=" + fmt(std::exp(w.new_dist.log_std[0])) +
                  " mu=" + fmt(w.new_dist.mean[0]));
}

CheckLine check_theorem_4_rollback_vs_clip(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  const double eps = 0.2;
  const double alpha = 0.3;
  const OutwardPushWitness w = outward_push_witness(eps);
  const TapeSurrogate clip = [&](Var r, double A) { return s.clip_var(r, A, eps); };
  const TapeSurrogate rb = [&](Var r, double A) { return s.rb_var(r, A, eps, alpha); };
  const double beta = w.beta_bar / 2.0;
  const double dev_clip = std::abs(w.ratio(0, w.step(clip, beta)) - 1.0);
  const double dev_rb = std::abs(w.ratio(0, w.step(rb, beta)) - 1.0);
  return line("theorem_4_rollback_vs_clip", dev_rb < dev_clip,
              "|r1-1| rb=" + fmt(dev_rb) + " clip=" + fmt(dev_clip) + " beta=" + fmt(beta));
}

CheckLine check_theorem_5_containment(const VerifyOptions& o) {
  const auto s = surrogates(o.mutation);
  const double eps = 0.2;
  const double alpha = 1e3;
  const auto batch = containment_batch();
  const auto rb = ascend_tabular_batch(batch, [&](Var r, double A) { return s.rb_var(r, A, eps, alpha); });
  const auto clip = ascend_tabular_batch(batch, [&](Var r, double A) { return s.clip_var(r, A, eps); });
  const bool ok = rb.converged && rb.max_deviation <= eps + 1e-3 && clip.max_deviation > eps;
  CheckLine l = line("theorem_5_containment", ok,
                     "rb_max|r-1|=" + fmt(rb.max_deviation) + " rb_converged=" + (rb.converged ? "1" : "0") +
                         " clip_max|r-1|=" + fmt(clip.max_deviation) + " eps=" + fmt(eps) + " alpha=" + fmt(alpha));
  if (!rb.converged && rb.max_deviation <= eps + 1e-3) l.status = CheckStatus::inconclusive;
  return l;
}

MonotonicSweep monotonic_sweep(std::size_t instances, double delta, std::uint64_t seed) {
  Rng rng(seed);
  MonotonicSweep out;
  out.worst_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instances; ++k) {
    const auto mdp = random_mdp(4, 3, rng, 0.9);
    const auto old_pi = random_policy_table(4, 3, rng);
    MonotonicOptions opt;
    opt.seed = rng();
    const auto res = monotonic_improvement_check(mdp, old_pi, delta, 0.0, opt);
    out.worst_gap = std::min(out.worst_gap, res.eta_new - res.eta_old);
    switch (res.status) {
      case CheckStatus::pass: ++out.pass; break;
      case CheckStatus::fail: ++out.fail; break;
      case CheckStatus::inconclusive: ++out.inconclusive; break;
    }
  }
  return out;
}

CheckLine check_theorem_6_monotonic(const VerifyOptions& o) {
  const auto sw = monotonic_sweep(o.monotonic_instances, o.monotonic_delta, o.seed + 8);
  CheckLine l;
  l.name = "theorem_6_monotonic";
  l.status = sw.fail > 0 ? CheckStatus::fail
             : sw.inconclusive > o.monotonic_inconclusive_allowed ? CheckStatus::inconclusive
                                                                   : CheckStatus::pass;
  l.detail = "instances=" + std::to_string(o.monotonic_instances) + " improved=" + std::to_string(sw.pass) +
             " violated=" + std::to_string(sw.fail) + " inconclusive=" + std::to_string(sw.inconclusive) +
             " min(eta_new-eta_old)=" + fmt(sw.worst_gap) + " delta=" + fmt(o.monotonic_delta) + " alpha=C";
  return l;
}

VerifyReport run_verify(const VerifyOptions& options) {
  using Check = CheckLine (*)(const VerifyOptions&);
  const Check checks[] = {check_gradients,
                          check_theorem_1_bound,
                          check_clip_case_form,
                          check_clip_lower_bound,
                          check_clip_improvement_condition,
                          check_rollback_continuity,
                          check_rollback_slope,
                          check_penalty_monotone,
                          check_theorem_2_outward_push,
                          check_theorem_3_categorical,
                          check_theorem_3_gaussian,
                          check_theorem_4_rollback_vs_clip,
                          check_theorem_5_containment,
                          check_theorem_6_monotonic};
  VerifyReport report;
  for (Check c : checks) {
    try {
      report.lines.push_back(c(options));
    } catch (const std::exception& e) {
      report.lines.push_back({"check_error", CheckStatus::fail, e.what()});
    }
  }
  return report;
}

}  // namespace proxlab
