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
// Acceptance suite: one PASS/FAIL line per criterion.
//
//   proxlab_acceptance [criteria...] [--known-fail ID]...
//
// Criteria are 1..12 ("8", "9" and "10" share the same training runs). A
// criterion listed with --known-fail still prints its real status but does
// not change the exit code.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "core/config.hpp"
#include "core/envs.hpp"
#include "core/objectives.hpp"
#include "core/oracle.hpp"
#include "core/trainer.hpp"
#include "core/verify.hpp"

namespace fs = std::filesystem;
using namespace proxlab;

namespace {

struct Outcome {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> g_out;

void report(const std::string& id, bool pass, const std::string& detail) {
  g_out.push_back({id, pass, detail});
  std::printf("criterion %-3s %s  %s\n", id.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// Policy evaluation by fixed-point iteration, independent of the library's
// linear solve. eta = (1 - gamma) * rho_1 . V
double eta_by_iteration(const TabularMDP& m, const PolicyTable& pi) {
  std::vector<double> V(m.n_states, 0.0), next(m.n_states);
  for (int it = 0; it < 5000; ++it) {
    double change = 0.0;
    for (std::size_t s = 0; s < m.n_states; ++s) {
      double v = 0.0;
      for (std::size_t a = 0; a < m.n_actions; ++a) {
        double cont = 0.0;
        for (std::size_t s2 = 0; s2 < m.n_states; ++s2) cont += m.T(s, a, s2) * V[s2];
        v += pi(s, a) * (m.c(s, a) + m.gamma * cont);
      }
      next[s] = v;
      change = std::max(change, std::abs(v - V[s]));
    }
    V.swap(next);
    if (change < 1e-16) break;
  }
  double eta = 0.0;
  for (std::size_t s = 0; s < m.n_states; ++s) eta += m.initial[s] * V[s];
  return (1.0 - m.gamma) * eta;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1 ---------------------------------------------------------------------------

void criterion_1() {
  Stopwatch sw;
  const auto sweep = gradient_sweep(100, 20260101);
  double worst = 0.0;
  bool all = !sweep.empty();
  std::string names;
  for (const auto& g : sweep) {
    worst = std::max(worst, g.worst_error);
    all = all && g.points == 100 && g.worst_error <= 1e-4;
    names += " " + g.variant;
  }
  const double t = sw.seconds();
  report("1", all && t < 60.0,
         "variants=" + std::to_string(sweep.size()) + " points=100 max_rel_err=" + num(worst) + " time=" + num(t) +
             "s;" + names);
}

// 2 ---------------------------------------------------------------------------

void criterion_2() {
  Stopwatch sw;
  Rng rng(7);
  std::uniform_int_distribution<std::size_t> ns(1, 5), na(2, 4);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  double min_gap = INFINITY, max_touch = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto mdp = random_mdp(ns(rng), na(rng), rng, 0.9);
    const auto old_pi = random_policy_table(mdp.n_states, mdp.n_actions, rng);
    const double t = mix(rng);
    const PolicyTable pi = (1.0 - t) * old_pi + t * random_policy_table(mdp.n_states, mdp.n_actions, rng);
    min_gap = std::min(min_gap, eta_by_iteration(mdp, pi) - lower_bound_M(mdp, old_pi, pi).M);
    max_touch = std::max(max_touch, std::abs(lower_bound_M(mdp, old_pi, old_pi).M - eta_by_iteration(mdp, old_pi)));
  }
  const double sec = sw.seconds();
  report("2", min_gap >= -1e-9 && max_touch <= 1e-9 && sec < 60.0,
         "mdps=1000 min(eta-M)=" + num(min_gap) + " max|M(old)-eta(old)|=" + num(max_touch) + " time=" + num(sec) +
             "s");
}

// 3, 5 ------------------------------------------------------------------------

void criteria_3_5() {
  const double eps = 0.2;
  const auto w = outward_push_witness(eps);
  const TapeSurrogate clip = [&](Var r, double A) { return l_clip(r, A, eps); };
  const TapeSurrogate rb = [&](Var r, double A) { return l_rb(r, A, eps, 0.3); };
  const double r0 = w.ratio(0, w.theta0);
  // Sample 0 sits in the clipped, improved branch and the batch gradient moves
  // its ratio further in the direction of its advantage.
  const bool clipped = std::abs(r0 - 1.0) > eps && (r0 - 1.0) * w.advantage[0] > 0.0;
  const double g = w.objective_grad(clip, w.theta0);
  const bool aligned = g * w.ratio_grad(0, w.theta0) * w.advantage[0] > 0.0;
  const double beta = w.beta_bar / 2.0;
  const double before = std::abs(r0 - 1.0);
  const double after_clip = std::abs(w.ratio(0, w.step(clip, beta)) - 1.0);
  const double after_rb = std::abs(w.ratio(0, w.step(rb, beta)) - 1.0);
  report("3", clipped && aligned && after_clip > before + 1e-12,
         "r1=" + num(r0) + " grad=" + num(g) + " |r1-1| " + num(before) + " -> " + num(after_clip) +
             " step=" + num(beta));
  report("5", after_rb + 1e-12 < after_clip,
         "|r1-1| after one step: rollback=" + num(after_rb) + " clip=" + num(after_clip) + " alpha=0.3");
}

// 4 ---------------------------------------------------------------------------

void criterion_4() {
  Stopwatch sw;
  const std::vector<double> p_old{0.2, 0.5, 0.3};
  const auto c = unbounded_kl_witness(p_old, 1, 0.2, 10.0);
  double kl_c = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    kl_c += p_old[i] * std::log(p_old[i] / c.p_new[i]);
    mass += c.p_new[i];
  }
  const double ratio_c = c.p_new[1] / p_old[1];

  const double a = 0.7;
  const GaussianDist g_old{{0.0}, {0.0}};
  const auto g = unbounded_kl_witness(g_old, a, 0.2, 10.0);
  const double mu = g.new_dist.mean[0], sigma = std::exp(g.new_dist.log_std[0]);
  const auto pdf = [](double x, double m, double s) {
    return std::exp(-0.5 * (x - m) * (x - m) / (s * s)) / (s * std::sqrt(2.0 * M_PI));
  };
  const double ratio_g = pdf(a, mu, sigma) / pdf(a, 0.0, 1.0);
  const double kl_g = std::log(sigma) + (1.0 + mu * mu) / (2.0 * sigma * sigma) - 0.5;
  const double sec = sw.seconds();

  const bool ok = std::abs(mass - 1.0) < 1e-9 && std::abs(ratio_c - 1.0) <= 0.2 && kl_c > 10.0 &&
                  std::abs(ratio_g - 1.0) <= 0.2 && kl_g > 10.0 && sec < 1.0;
  report("4", ok,
         "categorical ratio=" + num(ratio_c) + " kl=" + num(kl_c) + "; gaussian ratio=" + num(ratio_g) +
             " kl=" + num(kl_g) + " time=" + num(sec) + "s");
}

// 6 ---------------------------------------------------------------------------

void criterion_6() {
  Stopwatch sw;
  const double eps = 0.2;
  const auto batch = containment_batch();
  const auto rb = ascend_tabular_batch(batch, [&](Var r, double A) { return l_rb(r, A, eps, 1e3); });
  const auto clip = ascend_tabular_batch(batch, [&](Var r, double A) { return l_clip(r, A, eps); });
  double rb_dev = 0.0, clip_dev = 0.0;
  for (double r : rb.ratios) rb_dev = std::max(rb_dev, std::abs(r - 1.0));
  for (double r : clip.ratios) clip_dev = std::max(clip_dev, std::abs(r - 1.0));
  const double sec = sw.seconds();
  report("6", rb.converged && rb_dev <= eps + 1e-3 && clip_dev > eps && sec < 60.0,
         "rollback max|r-1|=" + num(rb_dev) + " converged=" + (rb.converged ? "yes" : "no") +
             " clip max|r-1|=" + num(clip_dev) + " time=" + num(sec) + "s");
}

// 7 ---------------------------------------------------------------------------

void criterion_7() {
  Stopwatch sw;
  Rng rng(20260108);
  int violations = 0, inconclusive = 0;
  double min_gain = INFINITY;
  for (int k = 0; k < 50; ++k) {
    const auto mdp = random_mdp(4, 3, rng, 0.9);
    const auto old_pi = random_policy_table(4, 3, rng);
    MonotonicOptions opt;
    opt.seed = rng();
    const auto res = monotonic_improvement_check(mdp, old_pi, 1e-3, 0.0, opt);
    const double gain = eta_by_iteration(mdp, res.new_pi) - eta_by_iteration(mdp, old_pi);
    min_gain = std::min(min_gain, gain);
    if (!res.converged || res.status == CheckStatus::inconclusive) {
      ++inconclusive;
    } else if (gain < -1e-9) {
      ++violations;
    }
  }
  const double sec = sw.seconds();
  report("7", violations == 0 && inconclusive <= 5 && sec < 600.0,
         "mdps=50 violations=" + std::to_string(violations) + " inconclusive=" + std::to_string(inconclusive) +
             " min(eta_new-eta_old)=" + num(min_gain) + " time=" + num(sec) + "s");
}

// 8, 9, 10 --------------------------------------------------------------------

struct SeedRuns {
  std::vector<std::vector<EpochMetrics>> per_seed;

  std::vector<double> pooled(double EpochMetrics::*field, std::size_t epochs) const {
    std::vector<double> v;
    for (const auto& s : per_seed) {
      for (std::size_t e = 0; e < std::min(epochs, s.size()); ++e) v.push_back(s[e].*field);
    }
    return v;
  }
};

SeedRuns balance_runs(Variant v, std::size_t epochs) {
  SeedRuns out;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    // Through the parser so each variant gets its own defaults, as with the CLI.
    const TrainConfig c = parse_config_text("variant = " + std::string(to_string(v)) + "\nseed = " +
                                            std::to_string(seed) + "\ntotal_timesteps = " +
                                            std::to_string(epochs * 1024) + "\n");
    out.per_seed.push_back(run(c));
  }
  return out;
}

void criteria_8_10() {
  Stopwatch sw;
  const auto ppo = balance_runs(Variant::CLIP, 150);
  const auto truly = balance_runs(Variant::TRULY, 150);
  const auto rb = balance_runs(Variant::RB, 100);
  const auto simple = balance_runs(Variant::CLIP_SIMPLE, 100);
  const double sec = sw.seconds();

  const double ppo_clip = median(ppo.pooled(&EpochMetrics::clipfrac, 100));
  const double rb_clip = median(rb.pooled(&EpochMetrics::clipfrac, 100));
  const double ppo_kl = median(ppo.pooled(&EpochMetrics::max_kl, 100));
  const double truly_kl = median(truly.pooled(&EpochMetrics::max_kl, 100));
  const double ppo_unimp = median(ppo.pooled(&EpochMetrics::unimproved_frac, 100));
  const double simple_unimp = median(simple.pooled(&EpochMetrics::unimproved_frac, 100));
  const std::string runs = " (5 seeds x 100 epochs, training time " + num(sec) + "s)";
  report("8a", ppo_clip > 0.05 && sec < 900.0, "ppo median clipfrac=" + num(ppo_clip) + " (> 0.05)" + runs);
  report("8b", rb_clip < ppo_clip, "rollback median clipfrac=" + num(rb_clip) + " < ppo " + num(ppo_clip));
  report("8c", truly_kl < ppo_kl, "truly median max_kl=" + num(truly_kl) + " < ppo " + num(ppo_kl));
  report("9", simple_unimp > ppo_unimp,
         "simple median unimproved_frac=" + num(simple_unimp) + " > ppo " + num(ppo_unimp));

  const auto first_hit = [](const std::vector<EpochMetrics>& s) -> long {
    for (const auto& m : s) {
      if (m.mean_episode_reward >= 195.0) return static_cast<long>(m.epoch);
    }
    return -1;
  };
  int ppo_hits = 0, truly_hits = 0;
  std::string detail = "epoch reaching 195 per seed: ppo";
  for (const auto& s : ppo.per_seed) {
    const long e = first_hit(s);
    ppo_hits += e >= 0;
    detail += " " + (e >= 0 ? std::to_string(e) : std::string("-"));
  }
  detail += "; truly";
  for (const auto& s : truly.per_seed) {
    const long e = first_hit(s);
    truly_hits += e >= 0;
    detail += " " + (e >= 0 ? std::to_string(e) : std::string("-"));
  }
  report("10", ppo_hits >= 4 && truly_hits >= 4, detail);
}

// 11, 12 ----------------------------------------------------------------------

int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("proxlab_acceptance_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void criterion_11() {
  const fs::path dir = scratch("determinism");
  const std::map<std::string, std::string> configs{
      {"clip", "total_timesteps = 4096\n"},
      {"truly_pointmass", "variant = truly\nenv = pointmass\ntotal_timesteps = 4096\nseed = 11\n"},
      {"penalty_chain", "variant = penalty\nenv = chain\ntotal_timesteps = 4096\nseed = 5\n"},
      {"rb_annealed", "variant = rb\nepsilon = linear(0.2, 0)\ntotal_timesteps = 4096\nseed = 3\n"},
  };
  int identical = 0, runs = 0;
  std::string bad;
  for (const auto& [name, text] : configs) {
    std::ofstream(dir / (name + ".cfg")) << text;
    ++runs;
    std::string first;
    bool same = true;
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / (name + "_" + std::to_string(k));
      const int rc = shell(std::string(PROXLAB_CLI) + " train --config " + (dir / (name + ".cfg")).string() +
                           " --out " + out.string());
      const std::string csv = slurp(out / "metrics.csv");
      if (rc != 0 || csv.empty()) same = false;
      if (k == 0) first = csv;
      else same = same && csv == first;
    }
    if (same) ++identical;
    else bad += " " + name;
  }
  report("11", identical == runs,
         std::to_string(identical) + "/" + std::to_string(runs) + " configs byte-identical across repeats" +
             (bad.empty() ? "" : "; differing:" + bad));
}

void criterion_12() {
  const fs::path dir = scratch("verify");
  const std::string cli = PROXLAB_CLI;
  const int clean = shell(cli + " verify --out " + (dir / "clean").string());
  std::string detail = "clean exit=" + std::to_string(clean);
  bool ok = clean == 0;
  for (const char* fixture : {"rollback_slope", "drop_min"}) {
    const fs::path out = dir / fixture;
    const int rc = shell(cli + " verify --fixture " + fixture + " --out " + out.string());
    const std::string text = slurp(out / "verify_report.txt");
    std::size_t fails = 0;
    for (std::size_t p = text.find(" FAIL"); p != std::string::npos; p = text.find(" FAIL", p + 1)) ++fails;
    ok = ok && rc != 0 && fails >= 1;
    detail += std::string("; ") + fixture + " exit=" + std::to_string(rc) + " FAIL lines=" + std::to_string(fails);
  }
  report("12", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<std::string> selected;
  std::vector<std::string> known;
  app.add_option("criteria", selected, "Criteria to run (default: all)");
  app.add_option("--known-fail", known, "Report this criterion but do not fail the run on it");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, void (*)()>> all{
      {"1", criterion_1},   {"2", criterion_2},    {"3", criteria_3_5}, {"4", criterion_4},
      {"6", criterion_6},   {"7", criterion_7},    {"8", criteria_8_10}, {"11", criterion_11},
      {"12", criterion_12},
  };
  // Criteria computed together.
  const std::map<std::string, std::string> alias{{"5", "3"}, {"9", "8"}, {"10", "8"}};
  std::set<std::string> want;
  for (const auto& s : selected) want.insert(alias.count(s) ? alias.at(s) : s);
  for (const auto& s : want) {
    if (std::none_of(all.begin(), all.end(), [&](const auto& e) { return e.first == s; })) {
      std::fprintf(stderr, "unknown criterion %s\n", s.c_str());
      return 2;
    }
  }

  for (const auto& [id, fn] : all) {
    if (!want.empty() && !want.count(id)) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("error: ") + e.what());
    }
  }
  fs::remove_all(fs::temp_directory_path() / ("proxlab_acceptance_" + std::to_string(::getpid())));

  int failed = 0;
  std::string tolerated;
  for (const auto& o : g_out) {
    if (o.pass) continue;
    if (std::find(known.begin(), known.end(), o.id) != known.end()) {
      tolerated += " " + o.id;
    } else {
      ++failed;
    }
  }
  std::printf("%zu criteria, %d failed", g_out.size(), failed);
  if (!tolerated.empty()) std::printf(", known failures reported but not counted:%s", tolerated.c_str());
  std::printf("\n");
  return failed == 0 ? 0 : 1;
}
