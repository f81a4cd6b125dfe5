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
#include "core/autodiff.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace proxlab {

namespace {
constexpr std::size_t kNoOp = std::numeric_limits<std::size_t>::max();

Tape& tape_of(Var a, Var b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    fail(ErrorCode::invalid_argument, "operands live on different tapes");
  }
  return *a.tape();
}

Tape& tape_of(Var a) {
  if (a.tape() == nullptr) fail(ErrorCode::invalid_argument, "variable is not on a tape");
  return *a.tape();
}
}  // namespace

const char* to_string(OpKind op) {
  switch (op) {
    case OpKind::leaf: return "leaf";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::mul: return "mul";
    case OpKind::div: return "div";
    case OpKind::neg: return "neg";
    case OpKind::exp: return "exp";
    case OpKind::log: return "log";
    case OpKind::tanh: return "tanh";
    case OpKind::min2: return "min2";
    case OpKind::max2: return "max2";
    case OpKind::clip: return "clip";
    case OpKind::affine: return "affine";
    case OpKind::sum: return "sum";
    case OpKind::custom: return "custom";
  }
  return "?";
}

Var Tape::push(OpKind op, double value, std::uint32_t n_parents) {
  const auto index = static_cast<std::uint32_t>(values_.size());
  values_.push_back(value);
  adjoints_.push_back(0.0);
  parent_begin_.push_back(static_cast<std::uint32_t>(parent_index_.size() - n_parents));
  parent_count_.push_back(n_parents);
  ops_.push_back(op);
  if (n_parents > 0 && (first_op_ == kNoOp || index < first_op_)) first_op_ = index;
  return Var(this, index);
}

Var Tape::leaf(double value) {
  return push(OpKind::leaf, value, 0);
}

std::vector<Var> Tape::leaves(std::span<const double> values) {
  std::vector<Var> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(leaf(v));
  return out;
}

Var Tape::unary(OpKind op, double value, Var a, double da) {
  parent_index_.push_back(a.index_);
  parent_grad_.push_back(da);
  return push(op, value, 1);
}

Var Tape::binary(OpKind op, double value, Var a, double da, Var b, double db) {
  parent_index_.push_back(a.index_);
  parent_grad_.push_back(da);
  parent_index_.push_back(b.index_);
  parent_grad_.push_back(db);
  return push(op, value, 2);
}

Var Tape::affine(Var bias, std::span<const Var> weights, std::span<const Var> inputs) {
  if (weights.size() != inputs.size()) fail(ErrorCode::invalid_argument, "affine size mismatch");
  const std::size_t n = weights.size();
  double acc = values_[bias.index_];
  const std::size_t base = parent_index_.size();
  parent_index_.resize(base + 1 + 2 * n);
  parent_grad_.resize(base + 1 + 2 * n);
  std::uint32_t* idx = parent_index_.data() + base;
  double* grad = parent_grad_.data() + base;
  idx[0] = bias.index_;
  grad[0] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = values_[weights[j].index_];
    const double x = values_[inputs[j].index_];
    acc += w * x;
    idx[1 + 2 * j] = weights[j].index_;
    grad[1 + 2 * j] = x;
    idx[2 + 2 * j] = inputs[j].index_;
    grad[2 + 2 * j] = w;
  }
  return push(OpKind::affine, acc, static_cast<std::uint32_t>(1 + 2 * n));
}

Var Tape::affine(Var bias, std::span<const Var> weights, std::span<const double> inputs) {
  if (weights.size() != inputs.size()) fail(ErrorCode::invalid_argument, "affine size mismatch");
  const std::size_t n = weights.size();
  double acc = values_[bias.index_];
  const std::size_t base = parent_index_.size();
  parent_index_.resize(base + 1 + n);
  parent_grad_.resize(base + 1 + n);
  std::uint32_t* idx = parent_index_.data() + base;
  double* grad = parent_grad_.data() + base;
  idx[0] = bias.index_;
  grad[0] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += values_[weights[j].index_] * inputs[j];
    idx[1 + j] = weights[j].index_;
    grad[1 + j] = inputs[j];
  }
  return push(OpKind::affine, acc, static_cast<std::uint32_t>(1 + n));
}

Var Tape::sum(std::span<const Var> terms) {
  if (terms.empty()) return leaf(0.0);
  double acc = 0.0;
  for (const Var& t : terms) {
    acc += values_[t.index_];
    parent_index_.push_back(t.index_);
    parent_grad_.push_back(1.0);
  }
  return push(OpKind::sum, acc, static_cast<std::uint32_t>(terms.size()));
}

Var Tape::custom(double value, std::span<const Var> parents, std::span<const double> grads) {
  if (parents.size() != grads.size()) fail(ErrorCode::invalid_argument, "custom node size mismatch");
  for (std::size_t k = 0; k < parents.size(); ++k) {
    parent_index_.push_back(parents[k].index_);
    parent_grad_.push_back(grads[k]);
  }
  return push(OpKind::custom, value, static_cast<std::uint32_t>(parents.size()));
}

void Tape::backward(Var root, double seed) {
  if (root.tape_ != this) fail(ErrorCode::invalid_argument, "root is not on this tape");
  const std::size_t r = root.index_;
  adjoints_[r] += seed;
  if (first_op_ == kNoOp || first_op_ > r) return;
  for (std::size_t i = r + 1; i-- > first_op_;) {
    const std::uint32_t n = parent_count_[i];
    if (n == 0) continue;
    const double a = adjoints_[i];
    if (a == 0.0) continue;
    if (!std::isfinite(a) || !std::isfinite(values_[i])) {
      fail(ErrorCode::numeric_error, "non-finite value in backward pass at node " + std::to_string(i) +
                                         " (" + to_string(ops_[i]) + ")");
    }
    adjoints_[i] = 0.0;
    const std::uint32_t b = parent_begin_[i];
    const std::uint32_t* idx = parent_index_.data() + b;
    const double* grad = parent_grad_.data() + b;
    for (std::uint32_t k = 0; k < n; ++k) adjoints_[idx[k]] += a * grad[k];
  }
}

std::vector<double> Tape::gradient(Var root, std::span<const Var> wrt) {
  zero_adjoints();
  backward(root);
  std::vector<double> out;
  out.reserve(wrt.size());
  for (const Var& v : wrt) {
    const double g = adjoints_[v.index_];
    if (!std::isfinite(g)) {
      fail(ErrorCode::numeric_error, "non-finite gradient at node " + std::to_string(v.index_));
    }
    out.push_back(g);
  }
  return out;
}

void Tape::zero_adjoints() { std::fill(adjoints_.begin(), adjoints_.end(), 0.0); }

void Tape::rewind(std::size_t mark) {
  if (mark >= values_.size()) return;
  const std::size_t parents = parent_begin_[mark];
  values_.resize(mark);
  adjoints_.resize(mark);
  parent_begin_.resize(mark);
  parent_count_.resize(mark);
  ops_.resize(mark);
  parent_index_.resize(parents);
  parent_grad_.resize(parents);
  if (first_op_ != kNoOp && first_op_ >= mark) first_op_ = kNoOp;
}

void Tape::clear() {
  values_.clear();
  adjoints_.clear();
  parent_begin_.clear();
  parent_count_.clear();
  ops_.clear();
  parent_index_.clear();
  parent_grad_.clear();
  first_op_ = kNoOp;
}

// ---- elementary operations --------------------------------------------------

Var operator+(Var a, Var b) { return tape_of(a, b).binary(OpKind::add, a.value() + b.value(), a, 1.0, b, 1.0); }
Var operator-(Var a, Var b) { return tape_of(a, b).binary(OpKind::sub, a.value() - b.value(), a, 1.0, b, -1.0); }
Var operator*(Var a, Var b) {
  return tape_of(a, b).binary(OpKind::mul, a.value() * b.value(), a, b.value(), b, a.value());
}
Var operator/(Var a, Var b) {
  const double bv = b.value();
  if (bv == 0.0) fail(ErrorCode::domain_error, "division by zero");
  return tape_of(a, b).binary(OpKind::div, a.value() / bv, a, 1.0 / bv, b, -a.value() / (bv * bv));
}
Var operator-(Var a) { return tape_of(a).unary(OpKind::neg, -a.value(), a, -1.0); }
Var operator+(Var a, double b) { return tape_of(a).unary(OpKind::add, a.value() + b, a, 1.0); }
Var operator+(double a, Var b) { return tape_of(b).unary(OpKind::add, a + b.value(), b, 1.0); }
Var operator-(Var a, double b) { return tape_of(a).unary(OpKind::sub, a.value() - b, a, 1.0); }
Var operator-(double a, Var b) { return tape_of(b).unary(OpKind::sub, a - b.value(), b, -1.0); }
Var operator*(Var a, double b) { return tape_of(a).unary(OpKind::mul, a.value() * b, a, b); }
Var operator*(double a, Var b) { return tape_of(b).unary(OpKind::mul, a * b.value(), b, a); }
Var operator/(Var a, double b) {
  if (b == 0.0) fail(ErrorCode::domain_error, "division by zero");
  return tape_of(a).unary(OpKind::div, a.value() / b, a, 1.0 / b);
}
Var operator/(double a, Var b) {
  const double bv = b.value();
  if (bv == 0.0) fail(ErrorCode::domain_error, "division by zero");
  return tape_of(b).unary(OpKind::div, a / bv, b, -a / (bv * bv));
}

Var exp(Var a) {
  const double v = std::exp(a.value());
  return tape_of(a).unary(OpKind::exp, v, a, v);
}

Var log(Var a) {
  const double x = a.value();
  if (!(x > 0.0)) fail(ErrorCode::domain_error, "log of a non-positive value");
  return tape_of(a).unary(OpKind::log, std::log(x), a, 1.0 / x);
}

Var tanh(Var a) {
  const double t = std::tanh(a.value());
  return tape_of(a).unary(OpKind::tanh, t, a, 1.0 - t * t);
}

Var min2(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return a.value() <= b.value() ? t.unary(OpKind::min2, a.value(), a, 1.0)
                                : t.unary(OpKind::min2, b.value(), b, 1.0);
}

Var min2(Var a, double b) {
  Tape& t = tape_of(a);
  return a.value() <= b ? t.unary(OpKind::min2, a.value(), a, 1.0) : t.leaf(b);
}

Var min2(double a, Var b) {
  Tape& t = tape_of(b);
  return a <= b.value() ? t.leaf(a) : t.unary(OpKind::min2, b.value(), b, 1.0);
}

Var max2(Var a, Var b) {
  Tape& t = tape_of(a, b);
  return a.value() >= b.value() ? t.unary(OpKind::max2, a.value(), a, 1.0)
                                : t.unary(OpKind::max2, b.value(), b, 1.0);
}

Var clip_range(Var x, double lo, double hi) {
  Tape& t = tape_of(x);
  const double v = x.value();
  if (v < lo) return t.unary(OpKind::clip, lo, x, 0.0);
  if (v > hi) return t.unary(OpKind::clip, hi, x, 0.0);
  return t.unary(OpKind::clip, v, x, 1.0);
}

Var log_sum_exp(std::span<const Var> xs) {
  if (xs.empty()) fail(ErrorCode::invalid_argument, "log_sum_exp of nothing");
  double m = xs[0].value();
  for (const Var& x : xs) m = std::max(m, x.value());
  double s = 0.0;
  for (const Var& x : xs) s += std::exp(x.value() - m);
  std::vector<double> softmax(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) softmax[i] = std::exp(xs[i].value() - m) / s;
  return tape_of(xs[0]).custom(m + std::log(s), xs, softmax);
}

// ---- finite differences -----------------------------------------------------

std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> point, double h) {
  if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "finite-difference step must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      fail(ErrorCode::numeric_error, "function is not finite near the check point");
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

double finite_diff_check(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> point, std::span<const double> analytic, double h) {
  if (analytic.size() != point.size()) fail(ErrorCode::invalid_argument, "gradient size mismatch");
  const auto numeric = central_difference(f, point, h);
  double worst = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double err = std::abs(analytic[i] - numeric[i]) / std::max(1.0, std::abs(analytic[i]));
    worst = std::max(worst, err);
  }
  return worst;
}

std::pair<double, std::vector<double>> value_and_gradient(const TapeFunction& f,
                                                          std::span<const double> point) {
  Tape tape;
  const auto params = tape.leaves(point);
  const Var out = f(tape, params);
  if (!std::isfinite(out.value())) fail(ErrorCode::numeric_error, "function value is not finite");
  return {out.value(), tape.gradient(out, params)};
}

double finite_diff_check(const TapeFunction& f, std::span<const double> point, double h) {
  const auto analytic = value_and_gradient(f, point).second;
  auto scalar = [&f](std::span<const double> x) {
    Tape tape;
    const auto params = tape.leaves(x);
    return f(tape, params).value();
  };
  return finite_diff_check(scalar, point, analytic, h);
}

}  // namespace proxlab
