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
#include "core/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace proxlab {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // log(2*pi)

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_normalized(std::span<const double> p, const char* which) {
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      fail(ErrorCode::invalid_argument, std::string(which) + " has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    fail(ErrorCode::invalid_argument, std::string(which) + " is not normalized");
  }
}

}  // namespace

void GaussianDist::validate() const {
  if (mean.size() != log_std.size()) {
    fail(ErrorCode::invalid_state, "gaussian mean and log_std dimensions differ");
  }
  if (!all_finite(mean) || !all_finite(log_std)) {
    fail(ErrorCode::invalid_state, "gaussian has non-finite parameters");
  }
}

void CategoricalDist::validate() const {
  if (logits.empty()) fail(ErrorCode::invalid_state, "categorical with no categories");
  if (!all_finite(logits)) fail(ErrorCode::invalid_state, "categorical has non-finite logits");
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> CategoricalDist::log_probs() const {
  const double lse = log_sum_exp(logits);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> CategoricalDist::probs() const {
  auto out = log_probs();
  for (double& x : out) x = std::exp(x);
  return out;
}

LogProb log_prob(const GaussianDist& dist, std::span<const double> action) {
  if (action.size() != dist.dim() || dist.log_std.size() != dist.dim()) {
    fail(ErrorCode::invalid_argument, "action dimension does not match gaussian");
  }
  dist.validate();
  double lp = 0.0;
  for (std::size_t i = 0; i < dist.dim(); ++i) {
    const double z = (action[i] - dist.mean[i]) * std::exp(-dist.log_std[i]);
    lp += -0.5 * z * z - dist.log_std[i] - 0.5 * kLogTwoPi;
  }
  return {lp};
}

LogProb log_prob(const CategoricalDist& dist, std::size_t action) {
  if (action >= dist.size()) fail(ErrorCode::invalid_argument, "categorical action out of range");
  dist.validate();
  return {dist.logits[action] - log_sum_exp(dist.logits)};
}

LogProb log_prob(const PolicyDist& dist, const Action& action) {
  if (const auto* g = std::get_if<GaussianDist>(&dist)) {
    const auto* a = std::get_if<std::vector<double>>(&action);
    if (!a) fail(ErrorCode::invalid_argument, "gaussian policy needs a continuous action");
    return log_prob(*g, *a);
  }
  const auto* a = std::get_if<std::size_t>(&action);
  if (!a) fail(ErrorCode::invalid_argument, "categorical policy needs a discrete action");
  return log_prob(std::get<CategoricalDist>(dist), *a);
}

double ratio(LogProb new_lp, LogProb old_lp) {
  if (!std::isfinite(new_lp.value) || !std::isfinite(old_lp.value)) {
    fail(ErrorCode::invalid_argument, "ratio of non-finite log-probabilities");
  }
  const double r = std::exp(new_lp.value - old_lp.value);
  if (std::isinf(r)) fail(ErrorCode::numeric_overflow, "likelihood ratio overflowed");
  return r;
}

double kl_categorical(std::span<const double> p_old, std::span<const double> p_new) {
  if (p_old.size() != p_new.size()) fail(ErrorCode::invalid_argument, "categorical sizes differ");
  check_normalized(p_old, "old distribution");
  check_normalized(p_new, "new distribution");
  double kl = 0.0;
  for (std::size_t i = 0; i < p_old.size(); ++i) {
    if (p_old[i] == 0.0) continue;
    if (p_new[i] == 0.0) return std::numeric_limits<double>::infinity();
    kl += p_old[i] * (std::log(p_old[i]) - std::log(p_new[i]));
  }
  return std::max(kl, 0.0);
}

double kl_categorical(const CategoricalDist& old_dist, const CategoricalDist& new_dist) {
  if (old_dist.size() != new_dist.size()) fail(ErrorCode::invalid_argument, "categorical sizes differ");
  old_dist.validate();
  new_dist.validate();
  const auto lo = old_dist.log_probs();
  const auto ln = new_dist.log_probs();
  double kl = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) kl += std::exp(lo[i]) * (lo[i] - ln[i]);
  return std::max(kl, 0.0);
}

double kl_gaussian(const GaussianDist& old_dist, const GaussianDist& new_dist) {
  if (old_dist.dim() != new_dist.dim()) fail(ErrorCode::invalid_argument, "gaussian dimensions differ");
  old_dist.validate();
  new_dist.validate();
  double kl = 0.0;
  for (std::size_t i = 0; i < old_dist.dim(); ++i) {
    const double var_ratio = std::exp(2.0 * (old_dist.log_std[i] - new_dist.log_std[i]));
    const double dm = (old_dist.mean[i] - new_dist.mean[i]) * std::exp(-new_dist.log_std[i]);
    kl += (new_dist.log_std[i] - old_dist.log_std[i]) + 0.5 * (var_ratio + dm * dm) - 0.5;
  }
  return std::max(kl, 0.0);
}

double kl(const PolicyDist& old_dist, const PolicyDist& new_dist) {
  if (old_dist.index() != new_dist.index()) fail(ErrorCode::invalid_argument, "distribution kinds differ");
  if (const auto* g = std::get_if<GaussianDist>(&old_dist)) {
    return kl_gaussian(*g, std::get<GaussianDist>(new_dist));
  }
  return kl_categorical(std::get<CategoricalDist>(old_dist), std::get<CategoricalDist>(new_dist));
}

double entropy(const GaussianDist& dist) {
  dist.validate();
  double h = 0.0;
  for (double ls : dist.log_std) h += ls + 0.5 * (kLogTwoPi + 1.0);
  return h;
}

double entropy(const CategoricalDist& dist) {
  dist.validate();
  const auto lp = dist.log_probs();
  double h = 0.0;
  for (double l : lp) h -= std::exp(l) * l;
  return std::max(h, 0.0);
}

double entropy_of_probs(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double entropy(const PolicyDist& dist) {
  return std::visit([](const auto& d) { return entropy(d); }, dist);
}

std::vector<double> sample(const GaussianDist& dist, Rng& rng) {
  dist.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(dist.dim());
  for (std::size_t i = 0; i < dist.dim(); ++i) {
    a[i] = dist.mean[i] + std::exp(dist.log_std[i]) * normal(rng);
  }
  return a;
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) fail(ErrorCode::invalid_argument, "cannot sample from an empty distribution");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cum += probs[i];
    if (u < cum) return i;
  }
  // u landed in the rounding gap above the cumulative sum.
  return last_positive;
}

std::size_t sample(const CategoricalDist& dist, Rng& rng) {
  dist.validate();
  return sample_index(dist.probs(), rng);
}

Action sample(const PolicyDist& dist, Rng& rng) {
  if (const auto* g = std::get_if<GaussianDist>(&dist)) return sample(*g, rng);
  return sample(std::get<CategoricalDist>(dist), rng);
}

}  // namespace proxlab
