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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace proxlab {

class Tape;

/// Handle to a scalar node on a Tape. Cheap to copy; valid while the tape
/// holds the node (see Tape::rewind).
class Var {
 public:
  Var() = default;

  double value() const;
  std::uint32_t index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
};

/// Operation tag, kept for error messages.
enum class OpKind : std::uint8_t {
  leaf, add, sub, mul, div, neg, exp, log, tanh, min2, max2, clip, affine, sum, custom
};

const char* to_string(OpKind op);

/// Append-only scalar computation record. Nodes are stored in insertion order,
/// which is a valid topological order. Each node keeps its parents and the
/// local partial derivative with respect to each of them.
///
/// Gradients accumulate into leaf adjoints: backward() propagates from a root
/// and clears interior adjoints as it goes, so repeated backward() calls from
/// different roots (e.g. one per sample after rewind()) sum leaf gradients.
///
/// One tape per thread; tapes are never shared.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(double value);
  std::vector<Var> leaves(std::span<const double> values);

  double value(Var v) const { return values_[v.index_]; }
  double adjoint(Var v) const { return adjoints_[v.index_]; }
  std::size_t size() const { return values_.size(); }

  /// Node with one or two parents and their local derivatives.
  Var unary(OpKind op, double value, Var a, double da);
  Var binary(OpKind op, double value, Var a, double da, Var b, double db);
  /// bias + sum_i w_i x_i as a single node.
  Var affine(Var bias, std::span<const Var> weights, std::span<const Var> inputs);
  /// bias + sum_i w_i x_i where the inputs are constants.
  Var affine(Var bias, std::span<const Var> weights, std::span<const double> inputs);
  Var sum(std::span<const Var> terms);
  /// General node: caller supplies the value and the local derivatives.
  Var custom(double value, std::span<const Var> parents, std::span<const double> grads);

  /// Accumulates seed * d(root)/d(leaf) into every leaf adjoint reachable from
  /// root. Throws numeric-error naming the node if a non-finite adjoint or a
  /// non-finite value with nonzero adjoint is met.
  void backward(Var root, double seed = 1.0);

  /// Fresh gradient of root with respect to each variable in wrt (zero for
  /// unreachable ones). Resets all adjoints first.
  std::vector<double> gradient(Var root, std::span<const Var> wrt);

  void zero_adjoints();

  /// Truncate the tape back to a previous size(). Adjoints of surviving nodes
  /// are kept, so leaf gradients survive a per-sample rewind.
  void rewind(std::size_t mark);
  void clear();

 private:
  Var push(OpKind op, double value, std::uint32_t n_parents);

  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<std::uint32_t> parent_begin_;
  std::vector<std::uint32_t> parent_count_;
  std::vector<OpKind> ops_;
  std::vector<std::uint32_t> parent_index_;
  std::vector<double> parent_grad_;
  // Every node below this index is a leaf; backward() stops here.
  std::size_t first_op_ = static_cast<std::size_t>(-1);
};

inline double Var::value() const { return tape_->value(*this); }

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

Var exp(Var a);
/// Throws domain-error for non-positive arguments.
Var log(Var a);
Var tanh(Var a);

/// Minimum; at a tie the gradient flows to the first argument.
Var min2(Var a, Var b);
Var min2(Var a, double b);
Var min2(double a, Var b);
/// Maximum; at a tie the gradient flows to the first argument.
Var max2(Var a, Var b);
/// Clamp to [lo, hi]; the boundary points take the interior derivative 1.
Var clip_range(Var x, double lo, double hi);

inline double min2(double a, double b) { return a <= b ? a : b; }
inline double max2(double a, double b) { return a >= b ? a : b; }
inline double clip_range(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

Var log_sum_exp(std::span<const Var> xs);

/// Scalar function of a parameter vector built on a tape.
using TapeFunction = std::function<Var(Tape&, std::span<const Var>)>;

/// Evaluate f on a fresh tape at point and return (value, gradient).
std::pair<double, std::vector<double>> value_and_gradient(const TapeFunction& f,
                                                          std::span<const double> point);

/// Max over coordinates of |analytic - central difference| / max(1, |analytic|),
/// with the analytic gradient taken by reverse mode through f. Throws
/// numeric-error if f is non-finite near point.
double finite_diff_check(const TapeFunction& f, std::span<const double> point, double h = 1e-5);

/// Same measure against a caller-supplied analytic gradient.
double finite_diff_check(const std::function<double(std::span<const double>)>& f,
                         std::span<const double> point, std::span<const double> analytic,
                         double h = 1e-5);

/// Central-difference gradient of f at point.
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> point, double h = 1e-5);

}  // namespace proxlab
