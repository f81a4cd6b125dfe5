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
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace proxlab {

/// Explicit, seedable generator state. Every stochastic operation takes one by
/// reference; nothing in the library owns a hidden global generator.
using Rng = std::mt19937_64;

/// Diagonal Gaussian over R^d with a per-dimension log standard deviation.
struct GaussianDist {
  std::vector<double> mean;
  std::vector<double> log_std;

  std::size_t dim() const { return mean.size(); }
  /// Throws invalid-state when fields are non-finite or dimensions disagree.
  void validate() const;
};

/// Categorical distribution parametrized by unnormalized logits.
struct CategoricalDist {
  std::vector<double> logits;

  std::size_t size() const { return logits.size(); }
  std::vector<double> probs() const;
  std::vector<double> log_probs() const;
  void validate() const;
};

using PolicyDist = std::variant<GaussianDist, CategoricalDist>;

/// Discrete actions are indices; continuous actions are real vectors.
using Action = std::variant<std::size_t, std::vector<double>>;

struct LogProb {
  double value = 0.0;
};

LogProb log_prob(const GaussianDist& dist, std::span<const double> action);
LogProb log_prob(const CategoricalDist& dist, std::size_t action);
LogProb log_prob(const PolicyDist& dist, const Action& action);

/// Likelihood ratio exp(new - old). Overflow to +inf is reported as
/// numeric-overflow rather than returned.
double ratio(LogProb new_lp, LogProb old_lp);

/// KL(p_old || p_new) over probability vectors. Returns +inf when p_new has a
/// zero where p_old does not.
double kl_categorical(std::span<const double> p_old, std::span<const double> p_new);
double kl_categorical(const CategoricalDist& old_dist, const CategoricalDist& new_dist);
/// KL(old || new), summed over independent dimensions.
double kl_gaussian(const GaussianDist& old_dist, const GaussianDist& new_dist);
double kl(const PolicyDist& old_dist, const PolicyDist& new_dist);

double entropy(const GaussianDist& dist);
double entropy(const CategoricalDist& dist);
/// Shannon entropy of a probability vector, with 0 log 0 = 0.
double entropy_of_probs(std::span<const double> probs);
double entropy(const PolicyDist& dist);

std::vector<double> sample(const GaussianDist& dist, Rng& rng);
std::size_t sample(const CategoricalDist& dist, Rng& rng);
/// Inverse-CDF draw from a probability vector (zeros allowed).
std::size_t sample_index(std::span<const double> probs, Rng& rng);
Action sample(const PolicyDist& dist, Rng& rng);

/// Log-sum-exp with max shift.
double log_sum_exp(std::span<const double> values);

}  // namespace proxlab
