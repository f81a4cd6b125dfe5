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
#include "core/mlp.hpp"

#include <cmath>

#include "core/error.hpp"

namespace proxlab {

std::size_t mlp_param_count(std::span<const std::size_t> sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) n += sizes[l + 1] * (sizes[l] + 1);
  return n;
}

void MlpParams::validate() const {
  if (sizes.size() < 2) fail(ErrorCode::invalid_argument, "mlp needs at least input and output sizes");
  for (std::size_t s : sizes) {
    if (s == 0) fail(ErrorCode::invalid_argument, "mlp layer sizes must be positive");
  }
  if (values.size() != mlp_param_count(sizes)) {
    fail(ErrorCode::invalid_argument, "mlp parameter vector does not match layer sizes");
  }
}

MlpParams mlp_init(std::vector<std::size_t> sizes, Rng& rng, double output_scale) {
  MlpParams p;
  p.sizes = std::move(sizes);
  p.values.resize(mlp_param_count(p.sizes));
  p.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < p.sizes.size(); ++l) {
    const std::size_t in = p.sizes[l];
    const std::size_t out = p.sizes[l + 1];
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    if (l + 2 == p.sizes.size()) scale *= output_scale;
    for (std::size_t k = 0; k < in * out; ++k) p.values[offset + k] = scale * normal(rng);
    offset += in * out + out;  // biases stay zero
  }
  return p;
}

std::vector<double> mlp_eval(const MlpParams& params, std::span<const double> input) {
  if (input.size() != params.input_size()) fail(ErrorCode::invalid_argument, "mlp input size mismatch");
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> y;
  const double* p = params.values.data();
  const std::size_t layers = params.sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = params.sizes[l];
    const std::size_t out = params.sizes[l + 1];
    const double* w = p;
    const double* b = p + in * out;
    y.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + o * in;
      for (std::size_t j = 0; j < in; ++j) acc += row[j] * x[j];
      y[o] = (l + 1 < layers) ? std::tanh(acc) : acc;
    }
    p += in * out + out;
    x.swap(y);
  }
  return x;
}

std::vector<Var> mlp_forward(Tape& tape, const MlpParams& params, std::span<const Var> leaves,
                             std::span<const double> input) {
  if (input.size() != params.input_size()) fail(ErrorCode::invalid_argument, "mlp input size mismatch");
  if (leaves.size() != params.values.size()) fail(ErrorCode::invalid_argument, "mlp leaf count mismatch");
  const std::size_t layers = params.sizes.size() - 1;
  std::vector<Var> x;
  std::vector<Var> y;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = params.sizes[l];
    const std::size_t out = params.sizes[l + 1];
    const std::size_t bias_offset = offset + in * out;
    y.clear();
    y.reserve(out);
    for (std::size_t o = 0; o < out; ++o) {
      const auto row = leaves.subspan(offset + o * in, in);
      Var pre = (l == 0) ? tape.affine(leaves[bias_offset + o], row, input)
                         : tape.affine(leaves[bias_offset + o], row, std::span<const Var>(x));
      y.push_back(l + 1 < layers ? tanh(pre) : pre);
    }
    offset = bias_offset + out;
    x.swap(y);
  }
  return x;
}

namespace {
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}  // namespace

Eigen::MatrixXd mlp_forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs, MlpBatchCache* cache) {
  if (static_cast<std::size_t>(inputs.cols()) != params.input_size()) {
    fail(ErrorCode::invalid_argument, "mlp input size mismatch");
  }
  const std::size_t layers = params.sizes.size() - 1;
  if (cache) {
    cache->activations.resize(layers + 1);
    cache->activations[0] = inputs;
  }
  Eigen::MatrixXd x = inputs;
  const double* p = params.values.data();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = static_cast<Eigen::Index>(params.sizes[l]);
    const auto out = static_cast<Eigen::Index>(params.sizes[l + 1]);
    Eigen::Map<const RowMajor> w(p, out, in);
    Eigen::Map<const Eigen::RowVectorXd> b(p + out * in, out);
    Eigen::MatrixXd y = x * w.transpose();
    y.rowwise() += b;
    if (l + 1 < layers) y = y.array().tanh().matrix();
    if (cache) cache->activations[l + 1] = y;
    x = std::move(y);
    p += out * in + out;
  }
  return x;
}

void mlp_backward_batch(const MlpParams& params, const MlpBatchCache& cache, const Eigen::MatrixXd& d_out,
                        std::span<double> grad) {
  const std::size_t layers = params.sizes.size() - 1;
  if (grad.size() != params.values.size() || cache.activations.size() != layers + 1) {
    fail(ErrorCode::invalid_argument, "mlp backward buffers do not match the network");
  }
  std::vector<std::size_t> offsets(layers);
  std::size_t off = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = off;
    off += params.sizes[l + 1] * (params.sizes[l] + 1);
  }
  Eigen::MatrixXd delta = d_out;  // gradient w.r.t. the pre-activation of the current layer
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(params.sizes[l]);
    const auto out = static_cast<Eigen::Index>(params.sizes[l + 1]);
    if (l + 1 < layers) {
      const auto& y = cache.activations[l + 1];
      delta = (delta.array() * (1.0 - y.array().square())).matrix();
    }
    const Eigen::MatrixXd& x = cache.activations[l];
    Eigen::Map<RowMajor> gw(grad.data() + offsets[l], out, in);
    Eigen::Map<Eigen::RowVectorXd> gb(grad.data() + offsets[l] + out * in, out);
    gw.noalias() += delta.transpose() * x;
    gb += delta.colwise().sum();
    if (l > 0) {
      Eigen::Map<const RowMajor> w(params.values.data() + offsets[l], out, in);
      delta = delta * w;
    }
  }
}

}  // namespace proxlab
