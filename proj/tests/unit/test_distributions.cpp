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
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "core/distributions.hpp"
#include "core/error.hpp"

namespace proxlab {
namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle: the normal density written out directly.
double normal_pdf(double x, double mu, double sigma) {
  return std::exp(-(x - mu) * (x - mu) / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * kPi));
}

// KL between two 1-D normals by midpoint quadrature on a wide grid.
double kl_quadrature(double m1, double s1, double m2, double s2) {
  const double lo = m1 - 12 * s1, hi = m1 + 12 * s1;
  const int n = 200000;
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double p = normal_pdf(x, m1, s1);
    if (p > 0) acc += p * (std::log(p) - std::log(normal_pdf(x, m2, s2))) * h;
  }
  return acc;
}

TEST(LogProb, GaussianStandardPeak) {
  GaussianDist d{{0.0}, {0.0}};
  const double x[] = {0.0};
  EXPECT_NEAR(log_prob(d, x).value, -0.5 * std::log(2 * kPi), 1e-15);
  EXPECT_NEAR(log_prob(d, x).value, -0.9189385332046727, 1e-12);
}

TEST(LogProb, GaussianTwoDimensionalPeak) {
  GaussianDist d{{1.0, 1.0}, {0.0, 0.0}};
  const double x[] = {1.0, 1.0};
  EXPECT_NEAR(log_prob(d, x).value, -std::log(2 * kPi), 1e-15);
}

TEST(LogProb, GaussianMatchesDensity) {
  GaussianDist d{{0.3, -1.2}, {0.4, -0.7}};
  const double x[] = {-0.5, -1.0};
  const double expect = std::log(normal_pdf(-0.5, 0.3, std::exp(0.4))) +
                        std::log(normal_pdf(-1.0, -1.2, std::exp(-0.7)));
  EXPECT_NEAR(log_prob(d, x).value, expect, 1e-12);
}

TEST(LogProb, CategoricalUniformPair) {
  CategoricalDist d{{0.0, 0.0}};
  EXPECT_NEAR(log_prob(d, 0).value, std::log(0.5), 1e-15);
}

TEST(LogProb, CategoricalLargeLogitsStayFinite) {
  CategoricalDist d{{1000.0, 0.0, -1000.0}};
  EXPECT_NEAR(log_prob(d, 0).value, 0.0, 1e-12);
  EXPECT_NEAR(log_prob(d, 1).value, -1000.0, 1e-9);
  const auto p = d.probs();
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-9);
}

TEST(LogProb, RejectsMismatchedInputs) {
  GaussianDist g{{0.0}, {0.0}};
  const double two[] = {0.0, 0.0};
  EXPECT_THROW(log_prob(g, two), Error);
  CategoricalDist c{{0.0, 0.0}};
  EXPECT_THROW(log_prob(c, 2), Error);
  EXPECT_THROW(log_prob(PolicyDist{c}, Action{std::vector<double>{0.0}}), Error);
  GaussianDist bad{{std::nan("")}, {0.0}};
  const double one[] = {0.0};
  EXPECT_THROW(log_prob(bad, one), Error);
}

TEST(Ratio, FromLogDifferences) {
  EXPECT_DOUBLE_EQ(ratio({-1.0}, {-1.0}), 1.0);
  EXPECT_NEAR(ratio({-1.0 + std::log(2.0)}, {-1.0}), 2.0, 1e-15);
  EXPECT_NEAR(ratio({-1.0 - std::log(4.0)}, {-1.0}), 0.25, 1e-15);
  EXPECT_THROW(ratio({1000.0}, {-1000.0}), Error);
}

TEST(Kl, CategoricalExamples) {
  const double a[] = {0.5, 0.5};
  const double b[] = {0.9, 0.1};
  const double c[] = {1.0, 0.0};
  EXPECT_EQ(kl_categorical(a, a), 0.0);
  EXPECT_NEAR(kl_categorical(a, b), 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1), 1e-15);
  EXPECT_NEAR(kl_categorical(a, b), 0.5108256237659907, 1e-12);
  EXPECT_TRUE(std::isinf(kl_categorical(a, c)));
  // Zero mass in the old distribution contributes nothing.
  EXPECT_NEAR(kl_categorical(c, a), std::log(2.0), 1e-15);
}

TEST(Kl, CategoricalFromLogitsMatchesProbabilities) {
  CategoricalDist o{{0.2, -0.4, 1.1}};
  CategoricalDist n{{-0.3, 0.5, 0.9}};
  EXPECT_NEAR(kl_categorical(o, n), kl_categorical(o.probs(), n.probs()), 1e-14);
}

TEST(Kl, GaussianExamples) {
  GaussianDist std_normal{{0.0}, {0.0}};
  EXPECT_EQ(kl_gaussian(std_normal, std_normal), 0.0);
  EXPECT_NEAR(kl_gaussian(std_normal, GaussianDist{{1.0}, {0.0}}), 0.5, 1e-15);
  EXPECT_NEAR(kl_gaussian(std_normal, GaussianDist{{0.0}, {1.0}}), 1.0 + std::exp(-2.0) / 2 - 0.5, 1e-15);
}

TEST(Kl, GaussianMatchesQuadrature) {
  GaussianDist o{{0.3}, {-0.2}};
  GaussianDist n{{-0.4}, {0.5}};
  EXPECT_NEAR(kl_gaussian(o, n), kl_quadrature(0.3, std::exp(-0.2), -0.4, std::exp(0.5)), 1e-7);
  // Dimensions add.
  GaussianDist o2{{0.3, 0.3}, {-0.2, -0.2}};
  GaussianDist n2{{-0.4, -0.4}, {0.5, 0.5}};
  EXPECT_NEAR(kl_gaussian(o2, n2), 2 * kl_gaussian(o, n), 1e-14);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(GaussianDist{{0.0}, {0.0}}), 0.5 * std::log(2 * kPi * std::numbers::e), 1e-15);
  EXPECT_NEAR(entropy(CategoricalDist{{0, 0, 0, 0}}), std::log(4.0), 1e-15);
  EXPECT_NEAR(entropy(CategoricalDist{{100.0, -100.0, -100.0}}), 0.0, 1e-12);
  const double det[] = {1.0, 0.0, 0.0};
  EXPECT_EQ(entropy_of_probs(det), 0.0);
}

TEST(Entropy, CategoricalMatchesSum) {
  CategoricalDist d{{0.7, -1.0, 0.1}};
  double h = 0.0;
  for (double p : d.probs()) h -= p * std::log(p);
  EXPECT_NEAR(entropy(d), h, 1e-15);
}

TEST(Sample, DegenerateGaussianReturnsMean) {
  Rng rng(1);
  GaussianDist d{{0.7, -2.0}, {-20.0, -20.0}};
  const auto a = sample(d, rng);
  EXPECT_NEAR(a[0], 0.7, 1e-6);
  EXPECT_NEAR(a[1], -2.0, 1e-6);
}

TEST(Sample, DeterministicCategorical) {
  Rng rng(2);
  const double p[] = {1.0, 0.0};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_index(p, rng), 0u);
  const double q[] = {0.0, 1.0};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_index(q, rng), 1u);
}

TEST(Sample, SeedDeterminism) {
  Rng a(7), b(7);
  const PolicyDist d = GaussianDist{{0.0, 1.0}, {0.0, 0.5}};
  for (int i = 0; i < 10; ++i) EXPECT_EQ(std::get<std::vector<double>>(sample(d, a)),
                                         std::get<std::vector<double>>(sample(d, b)));
}

TEST(Sample, CategoricalFrequencies) {
  Rng rng(3);
  CategoricalDist d{{std::log(0.2), std::log(0.3), std::log(0.5)}};
  std::vector<int> counts(3);
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[sample(d, rng)];
  EXPECT_NEAR(counts[0] / double(n), 0.2, 0.005);
  EXPECT_NEAR(counts[1] / double(n), 0.3, 0.005);
  EXPECT_NEAR(counts[2] / double(n), 0.5, 0.005);
}

TEST(Sample, GaussianMoments) {
  Rng rng(4);
  GaussianDist d{{1.5}, {std::log(0.5)}};
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = sample(d, rng)[0];
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 1.5, 0.01);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 0.5, 0.01);
}

}  // namespace
}  // namespace proxlab
