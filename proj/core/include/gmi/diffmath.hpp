// Copyright 2026 The gmi-graph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Define-by-run reverse-mode differentiation over dense row-major matrices.
//
// Forward ops append a node to a Tape; Tape::Backward walks the nodes once in
// reverse order, accumulates gradients, adds leaf gradients into their
// Parameters and clears the tape. Every forward result is checked for NaN/Inf.

#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmi/sparse.hpp"

namespace gmi {

/// Trainable matrix owned outside any tape.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v) : name(std::move(n)), value(std::move(v)) { ZeroGrad(); }

  void ZeroGrad() { grad = Matrix::Zero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid until the tape
/// is cleared.
class Tensor {
 public:
  Tensor() = default;

  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  const Matrix& value() const;
  /// Accumulated gradient; zero-sized until Backward reaches this node.
  const Matrix& grad() const;
  bool requires_grad() const;
  /// Value of a 1x1 tensor.
  double item() const;

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Tensor(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

class Tape {
 public:
  /// Receives the gradient of the loss w.r.t. the node's output.
  using BackwardFn = std::function<void(const Matrix& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor Constant(Matrix value);
  /// Leaf bound to `param`; Backward adds its gradient into param.grad.
  Tensor Leaf(Parameter& param);

  /// Appends an op result. `backward` runs only if the node requires grad.
  Tensor Record(std::string_view op, Matrix value, bool requires_grad, BackwardFn backward);

  /// Adds g into t's gradient (no-op for constants).
  void Accumulate(const Tensor& t, const Matrix& g);

  /// Seeds d loss / d loss = 1, runs every backward rule once in reverse
  /// order, writes leaf gradients into their Parameters and clears the tape.
  void Backward(const Tensor& loss);

  size_t size() const { return nodes_.size(); }
  void Clear() { nodes_.clear(); }

 private:
  friend class Tensor;

  struct Node {
    std::string_view op;
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
  };

  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }

  // deque: references to earlier nodes stay valid while new ones are appended.
  std::deque<Node> nodes_;
};

using NodePair = std::pair<NodeId, NodeId>;

// ---------------------------------------------------------------------------
// Differentiable operations. Inputs must live on the same tape.

Tensor MatMul(const Tensor& a, const Tensor& b);
/// s * d with s constant. `s` must outlive the backward pass.
Tensor SpMM(const CsrMatrix& s, const Tensor& d);
/// max(x, 0) + slope * min(x, 0), slope a trainable 1x1 tensor.
Tensor PRelu(const Tensor& x, const Tensor& slope);
Tensor Sigmoid(const Tensor& x);
/// log(1 + e^x), computed as max(x, 0) + log1p(e^{-|x|}).
Tensor Softplus(const Tensor& x);
Tensor Log(const Tensor& x);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& x, double s);
Tensor Neg(const Tensor& x);
Tensor Transpose(const Tensor& x);
Tensor Reshape(const Tensor& x, Eigen::Index rows, Eigen::Index cols);
Tensor SumAll(const Tensor& x);
Tensor Mean(const Tensor& x);
/// Mean over columns: rows x cols -> rows x 1.
Tensor RowMean(const Tensor& x);
/// out(k) = a.row(pairs[k].first) . b.row(pairs[k].second), a column vector.
Tensor PairDot(const Tensor& a, const Tensor& b, std::span<const NodePair> pairs);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return Add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return Sub(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return Scale(a, s); }
inline Tensor operator-(const Tensor& a) { return Neg(a); }

// Plain numeric helpers shared with non-differentiable code.
double StableSoftplus(double x);
double StableSigmoid(double x);

// ---------------------------------------------------------------------------
// Finite-difference gradient checking

struct GradCheckOptions {
  double eps = 1e-5;
  /// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double floor = 1e-3;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string parameter;  // name of the worst parameter
  Eigen::Index row = -1;
  Eigen::Index col = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  size_t coordinates = 0;
};

/// `loss_fn` records a scalar loss on the given tape, reading every parameter
/// through Tape::Leaf. It must be deterministic for fixed parameter values.
using LossFn = std::function<Tensor(Tape&)>;

/// Central differences on every coordinate of every parameter vs the tape's
/// analytic gradient.
GradCheckResult GradCheck(const LossFn& loss_fn, std::span<Parameter* const> params,
                          const GradCheckOptions& options = {});

// ---------------------------------------------------------------------------
// Fault injection for checker-sensitivity tests and `gmi verify
// --inject-fault`. Never enabled in normal runs.

enum class InjectedFault { kNone, kSoftplusBackward, kMatMulBackward };

void SetInjectedFault(InjectedFault fault);
InjectedFault GetInjectedFault();

}  // namespace gmi
