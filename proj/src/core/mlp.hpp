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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/autodiff.hpp"
#include "core/distributions.hpp"

namespace proxlab {

/// Fully connected network with tanh hidden layers and a linear output layer.
///
/// `sizes` lists layer widths from input to output, e.g. {4, 64, 64, 2}.
/// Parameters are stored flat, layer by layer: the out x in weight matrix in
/// row-major order followed by the out-length bias.
struct MlpParams {
  std::vector<std::size_t> sizes;
  std::vector<double> values;

  std::size_t input_size() const { return sizes.front(); }
  std::size_t output_size() const { return sizes.back(); }
  /// Throws invalid-argument when sizes are degenerate or values has the wrong length.
  void validate() const;
};

std::size_t mlp_param_count(std::span<const std::size_t> sizes);

/// Zero-mean Gaussian init scaled by 1/sqrt(fan_in); the last layer is further
/// scaled by output_scale. Biases start at zero.
MlpParams mlp_init(std::vector<std::size_t> sizes, Rng& rng, double output_scale = 1.0);

/// Plain forward pass.
std::vector<double> mlp_eval(const MlpParams& params, std::span<const double> input);

/// Forward pass recorded on a tape. `leaves` are the tape variables standing
/// for params.values (same order). Produces bit-identical values to mlp_eval.
std::vector<Var> mlp_forward(Tape& tape, const MlpParams& params, std::span<const Var> leaves,
                             std::span<const double> input);

/// Layer outputs kept by the batched forward pass; entry 0 is the input.
struct MlpBatchCache {
  std::vector<Eigen::MatrixXd> activations;
};

/// Row-batched forward pass (one sample per row). Agrees with mlp_eval up to
/// summation order.
Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                                  MlpBatchCache* cache = nullptr);

/// Adds d/d(params) of sum_rows <d_out_row, output_row> into grad, which has
/// the layout of params.values.
void mlp_backward_batch(const MlpParams& params, const MlpBatchCache& cache, const Eigen::MatrixXd& d_out,
                        std::span<double> grad);

}  // namespace proxlab
