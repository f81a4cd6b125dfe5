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

#include <vector>

#include "core/autodiff.hpp"
#include "core/distributions.hpp"

namespace proxlab {

/// A policy distribution whose parameters live on a tape.
/// Categorical uses `logits`; Gaussian uses `mean` and `log_std`.
struct DistVar {
  bool categorical = true;
  std::vector<Var> logits;
  std::vector<Var> mean;
  std::vector<Var> log_std;

  static DistVar make_categorical(std::vector<Var> logits);
  static DistVar make_gaussian(std::vector<Var> mean, std::vector<Var> log_std);

  /// Plain snapshot of the current values.
  PolicyDist value() const;
};

// Each of these records a single node whose value is computed by the plain
// function of the same name, so tape and non-tape results agree bit for bit.

Var log_prob(Tape& tape, const DistVar& dist, const Action& action);
/// KL(old || dist) with the old side held constant.
Var kl(Tape& tape, const PolicyDist& old_dist, const DistVar& dist);
Var entropy(Tape& tape, const DistVar& dist);

}  // namespace proxlab
