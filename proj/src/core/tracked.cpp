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
#include "core/tracked.hpp"

#include <cmath>

#include "core/error.hpp"

namespace proxlab {

namespace {

std::vector<double> values_of(const std::vector<Var>& vars) {
  std::vector<double> out(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) out[i] = vars[i].value();
  return out;
}

std::vector<Var> concat(const std::vector<Var>& a, const std::vector<Var>& b) {
  std::vector<Var> out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

DistVar DistVar::make_categorical(std::vector<Var> logits) {
  DistVar d;
  d.categorical = true;
  d.logits = std::move(logits);
  return d;
}

DistVar DistVar::make_gaussian(std::vector<Var> mean, std::vector<Var> log_std) {
  if (mean.size() != log_std.size()) fail(ErrorCode::invalid_argument, "gaussian mean/log_std size mismatch");
  DistVar d;
  d.categorical = false;
  d.mean = std::move(mean);
  d.log_std = std::move(log_std);
  return d;
}

PolicyDist DistVar::value() const {
  if (categorical) return CategoricalDist{values_of(logits)};
  return GaussianDist{values_of(mean), values_of(log_std)};
}

Var log_prob(Tape& tape, const DistVar& dist, const Action& action) {
  if (dist.categorical) {
    const auto* a = std::get_if<std::size_t>(&action);
    if (!a) fail(ErrorCode::invalid_argument, "categorical policy needs a discrete action");
    CategoricalDist d{values_of(dist.logits)};
    const double lp = log_prob(d, *a).value;
    std::vector<double> grads = d.probs();
    for (double& g : grads) g = -g;
    grads[*a] += 1.0;
    return tape.custom(lp, dist.logits, grads);
  }
  const auto* a = std::get_if<std::vector<double>>(&action);
  if (!a) fail(ErrorCode::invalid_argument, "gaussian policy needs a continuous action");
  GaussianDist d{values_of(dist.mean), values_of(dist.log_std)};
  const double lp = log_prob(d, *a).value;
  const std::size_t n = d.dim();
  std::vector<double> grads(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_std = std::exp(-d.log_std[i]);
    const double z = ((*a)[i] - d.mean[i]) * inv_std;
    grads[i] = z * inv_std;
    grads[n + i] = z * z - 1.0;
  }
  return tape.custom(lp, concat(dist.mean, dist.log_std), grads);
}

Var kl(Tape& tape, const PolicyDist& old_dist, const DistVar& dist) {
  if (dist.categorical) {
    const auto* old_c = std::get_if<CategoricalDist>(&old_dist);
    if (!old_c) fail(ErrorCode::invalid_argument, "distribution kinds differ");
    CategoricalDist d{values_of(dist.logits)};
    const double value = kl_categorical(*old_c, d);
    // d/dlogit_i = p_new_i - p_old_i
    std::vector<double> grads = d.probs();
    const auto p_old = old_c->probs();
    for (std::size_t i = 0; i < grads.size(); ++i) grads[i] -= p_old[i];
    return tape.custom(value, dist.logits, grads);
  }
  const auto* old_g = std::get_if<GaussianDist>(&old_dist);
  if (!old_g) fail(ErrorCode::invalid_argument, "distribution kinds differ");
  GaussianDist d{values_of(dist.mean), values_of(dist.log_std)};
  const double value = kl_gaussian(*old_g, d);
  const std::size_t n = d.dim();
  std::vector<double> grads(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_var = std::exp(-2.0 * d.log_std[i]);
    const double dm = d.mean[i] - old_g->mean[i];
    grads[i] = dm * inv_var;
    grads[n + i] = 1.0 - std::exp(2.0 * (old_g->log_std[i] - d.log_std[i])) - dm * dm * inv_var;
  }
  return tape.custom(value, concat(dist.mean, dist.log_std), grads);
}

Var entropy(Tape& tape, const DistVar& dist) {
  if (dist.categorical) {
    CategoricalDist d{values_of(dist.logits)};
    const double h = entropy(d);
    // dH/dlogit_j = -p_j (log p_j + H)
    const auto lp = d.log_probs();
    std::vector<double> grads(lp.size());
    for (std::size_t j = 0; j < lp.size(); ++j) grads[j] = -std::exp(lp[j]) * (lp[j] + h);
    return tape.custom(h, dist.logits, grads);
  }
  GaussianDist d{values_of(dist.mean), values_of(dist.log_std)};
  std::vector<double> grads(d.dim(), 1.0);
  return tape.custom(entropy(d), dist.log_std, grads);
}

}  // namespace proxlab
