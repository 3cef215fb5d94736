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

#include "gmi/diffmath.hpp"

#include <atomic>
#include <cmath>
#include <algorithm>

#include "gmi/error.hpp"

namespace gmi {
namespace {

std::atomic<InjectedFault> g_fault{InjectedFault::kNone};

std::string Shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Tape& SameTape(const Tensor& a, const Tensor& b, std::string_view op) {
  if (!a.valid() || !b.valid() || a.tape() != b.tape()) {
    throw Error(std::string(op) + ": operands must live on the same tape");
  }
  return *a.tape();
}

Tape& TapeOf(const Tensor& a, std::string_view op) {
  if (!a.valid()) throw Error(std::string(op) + ": invalid tensor");
  return *a.tape();
}

void RequireSameShape(const Tensor& a, const Tensor& b, std::string_view op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + Shape(a.value()) + " vs " +
                         Shape(b.value()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor / Tape

const Matrix& Tensor::value() const { return tape_->node(id_).value; }
const Matrix& Tensor::grad() const { return tape_->node(id_).grad; }
bool Tensor::requires_grad() const { return tape_->node(id_).requires_grad; }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.size() != 1) throw DimensionError("item() on a " + Shape(v) + " tensor");
  return v(0, 0);
}

Tensor Tape::Constant(Matrix value) {
  return Record("constant", std::move(value), false, nullptr);
}

Tensor Tape::Leaf(Parameter& param) {
  Tensor t = Record("leaf", param.value, true, nullptr);
  nodes_.back().param = &param;
  return t;
}

Tensor Tape::Record(std::string_view op, Matrix value, bool requires_grad, BackwardFn backward) {
  if (!value.allFinite()) {
    throw NumericalError("non-finite value produced by " + std::string(op));
  }
  Node& n = nodes_.emplace_back();
  n.op = op;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.backward = std::move(backward);
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::Accumulate(const Tensor& t, const Matrix& g) {
  Node& n = nodes_[static_cast<size_t>(t.id())];
  if (!n.requires_grad) return;
  if (g.rows() != n.value.rows() || g.cols() != n.value.cols()) {
    throw DimensionError("gradient " + Shape(g) + " does not match " + std::string(n.op) +
                         " output " + Shape(n.value));
  }
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::Backward(const Tensor& loss) {
  if (loss.tape() != this) throw Error("Backward: loss lives on another tape");
  if (loss.value().size() != 1) {
    throw DimensionError("Backward needs a scalar loss, got " + Shape(loss.value()));
  }
  nodes_[static_cast<size_t>(loss.id())].grad = Matrix::Ones(1, 1);
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(n.grad);
    if (n.param != nullptr) {
      if (n.param->grad.rows() != n.grad.rows() || n.param->grad.cols() != n.grad.cols()) {
        n.param->ZeroGrad();
      }
      n.param->grad += n.grad;
    }
  }
  Clear();
}

// ---------------------------------------------------------------------------
// Ops

Tensor MatMul(const Tensor& a, const Tensor& b) {
  Tape& tape = SameTape(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + Shape(a.value()) + " times " + Shape(b.value()));
  }
  Matrix out = a.value() * b.value();
  return tape.Record("matmul", std::move(out), a.requires_grad() || b.requires_grad(),
                     [&tape, a, b](const Matrix& g) {
                       if (a.requires_grad()) {
                         Matrix ga = g * b.value().transpose();
                         if (g_fault.load() == InjectedFault::kMatMulBackward) ga *= 1.1;
                         tape.Accumulate(a, ga);
                       }
                       if (b.requires_grad()) tape.Accumulate(b, a.value().transpose() * g);
                     });
}

Tensor SpMM(const CsrMatrix& s, const Tensor& d) {
  Tape& tape = TapeOf(d, "spmm");
  Matrix out = SparseDenseProduct(s, d.value());
  const CsrMatrix* sp = &s;
  return tape.Record("spmm", std::move(out), d.requires_grad(), [&tape, sp, d](const Matrix& g) {
    tape.Accumulate(d, SparseTransposeDenseProduct(*sp, g));
  });
}

Tensor PRelu(const Tensor& x, const Tensor& slope) {
  Tape& tape = SameTape(x, slope, "prelu");
  if (slope.value().size() != 1) throw DimensionError("prelu: slope must be 1x1");
  const double a = slope.item();
  Matrix out = x.value().unaryExpr([a](double v) { return v >= 0.0 ? v : a * v; });
  return tape.Record("prelu", std::move(out), x.requires_grad() || slope.requires_grad(),
                     [&tape, x, slope, a](const Matrix& g) {
                       const Matrix& xv = x.value();
                       if (x.requires_grad()) {
                         Matrix gx = g.binaryExpr(xv, [a](double gi, double v) {
                           return v >= 0.0 ? gi : a * gi;
                         });
                         tape.Accumulate(x, gx);
                       }
                       if (slope.requires_grad()) {
                         const double gs = g.binaryExpr(xv, [](double gi, double v) {
                                              return v >= 0.0 ? 0.0 : gi * v;
                                            }).sum();
                         tape.Accumulate(slope, Matrix::Constant(1, 1, gs));
                       }
                     });
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double StableSoftplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Tensor Sigmoid(const Tensor& x) {
  Tape& tape = TapeOf(x, "sigmoid");
  Matrix out = x.value().unaryExpr([](double v) { return StableSigmoid(v); });
  return tape.Record("sigmoid", std::move(out), x.requires_grad(), [&tape, x](const Matrix& g) {
    Matrix gx = g.binaryExpr(x.value(), [](double gi, double v) {
      const double s = StableSigmoid(v);
      return gi * s * (1.0 - s);
    });
    tape.Accumulate(x, gx);
  });
}

Tensor Softplus(const Tensor& x) {
  Tape& tape = TapeOf(x, "softplus");
  Matrix out = x.value().unaryExpr([](double v) { return StableSoftplus(v); });
  return tape.Record("softplus", std::move(out), x.requires_grad(), [&tape, x](const Matrix& g) {
    const bool faulty = g_fault.load() == InjectedFault::kSoftplusBackward;
    Matrix gx = g.binaryExpr(x.value(), [faulty](double gi, double v) {
      return gi * StableSigmoid(faulty ? -v : v);
    });
    tape.Accumulate(x, gx);
  });
}

Tensor Log(const Tensor& x) {
  Tape& tape = TapeOf(x, "log");
  if ((x.value().array() <= 0.0).any()) throw DomainError("log of a non-positive value");
  Matrix out = x.value().array().log().matrix();
  return tape.Record("log", std::move(out), x.requires_grad(), [&tape, x](const Matrix& g) {
    tape.Accumulate(x, (g.array() / x.value().array()).matrix());
  });
}

Tensor Add(const Tensor& a, const Tensor& b) {
  Tape& tape = SameTape(a, b, "add");
  RequireSameShape(a, b, "add");
  return tape.Record("add", a.value() + b.value(), a.requires_grad() || b.requires_grad(),
                     [&tape, a, b](const Matrix& g) {
                       tape.Accumulate(a, g);
                       tape.Accumulate(b, g);
                     });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  Tape& tape = SameTape(a, b, "sub");
  RequireSameShape(a, b, "sub");
  return tape.Record("sub", a.value() - b.value(), a.requires_grad() || b.requires_grad(),
                     [&tape, a, b](const Matrix& g) {
                       tape.Accumulate(a, g);
                       tape.Accumulate(b, -g);
                     });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  Tape& tape = SameTape(a, b, "mul");
  RequireSameShape(a, b, "mul");
  Matrix out = a.value().cwiseProduct(b.value());
  return tape.Record("mul", std::move(out), a.requires_grad() || b.requires_grad(),
                     [&tape, a, b](const Matrix& g) {
                       if (a.requires_grad()) tape.Accumulate(a, g.cwiseProduct(b.value()));
                       if (b.requires_grad()) tape.Accumulate(b, g.cwiseProduct(a.value()));
                     });
}

Tensor Scale(const Tensor& x, double s) {
  Tape& tape = TapeOf(x, "scale");
  return tape.Record("scale", x.value() * s, x.requires_grad(),
                     [&tape, x, s](const Matrix& g) { tape.Accumulate(x, g * s); });
}

Tensor Neg(const Tensor& x) { return Scale(x, -1.0); }

Tensor Transpose(const Tensor& x) {
  Tape& tape = TapeOf(x, "transpose");
  Matrix out = x.value().transpose();
  return tape.Record("transpose", std::move(out), x.requires_grad(),
                     [&tape, x](const Matrix& g) { tape.Accumulate(x, g.transpose()); });
}

Tensor Reshape(const Tensor& x, Eigen::Index rows, Eigen::Index cols) {
  Tape& tape = TapeOf(x, "reshape");
  if (rows * cols != x.value().size()) {
    throw DimensionError("reshape: " + Shape(x.value()) + " to " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  // Row-major storage: reshaping is a reinterpretation of the same buffer.
  Matrix out = Eigen::Map<const Matrix>(x.value().data(), rows, cols);
  const Eigen::Index r0 = x.rows();
  const Eigen::Index c0 = x.cols();
  return tape.Record("reshape", std::move(out), x.requires_grad(),
                     [&tape, x, r0, c0](const Matrix& g) {
                       tape.Accumulate(x, Eigen::Map<const Matrix>(g.data(), r0, c0));
                     });
}

Tensor SumAll(const Tensor& x) {
  Tape& tape = TapeOf(x, "sum");
  return tape.Record("sum", Matrix::Constant(1, 1, x.value().sum()), x.requires_grad(),
                     [&tape, x](const Matrix& g) {
                       tape.Accumulate(x, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
                     });
}

Tensor Mean(const Tensor& x) {
  const auto n = static_cast<double>(x.value().size());
  if (n == 0) throw DimensionError("mean of an empty tensor");
  return Scale(SumAll(x), 1.0 / n);
}

Tensor RowMean(const Tensor& x) {
  Tape& tape = TapeOf(x, "row_mean");
  const auto cols = static_cast<double>(x.cols());
  if (x.cols() == 0) throw DimensionError("row_mean over zero columns");
  Matrix out = x.value().rowwise().sum() / cols;
  return tape.Record("row_mean", std::move(out), x.requires_grad(),
                     [&tape, x, cols](const Matrix& g) {
                       Matrix gx = (g / cols).replicate(1, x.cols());
                       tape.Accumulate(x, gx);
                     });
}

Tensor PairDot(const Tensor& a, const Tensor& b, std::span<const NodePair> pairs) {
  Tape& tape = SameTape(a, b, "pair_dot");
  if (a.cols() != b.cols()) {
    throw DimensionError("pair_dot: " + Shape(a.value()) + " vs " + Shape(b.value()));
  }
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  Matrix out(static_cast<Eigen::Index>(pairs.size()), 1);
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (i < 0 || i >= av.rows() || j < 0 || j >= bv.rows()) {
      throw DimensionError("pair_dot: pair (" + std::to_string(i) + "," + std::to_string(j) +
                           ") out of range");
    }
    out(static_cast<Eigen::Index>(k), 0) = av.row(i).dot(bv.row(j));
  }
  // The pair list is copied so callers may reuse their buffer.
  std::vector<NodePair> saved(pairs.begin(), pairs.end());
  return tape.Record("pair_dot", std::move(out), a.requires_grad() || b.requires_grad(),
                     [&tape, a, b, saved = std::move(saved)](const Matrix& g) {
                       const Matrix& av = a.value();
                       const Matrix& bv = b.value();
                       const bool same = a.id() == b.id();
                       Matrix ga = Matrix::Zero(av.rows(), av.cols());
                       Matrix gb;
                       if (!same && b.requires_grad()) gb = Matrix::Zero(bv.rows(), bv.cols());
                       for (size_t k = 0; k < saved.size(); ++k) {
                         const auto [i, j] = saved[k];
                         const double gk = g(static_cast<Eigen::Index>(k), 0);
                         if (gk == 0.0) continue;
                         ga.row(i).noalias() += gk * bv.row(j);
                         if (same) {
                           ga.row(j).noalias() += gk * av.row(i);
                         } else if (b.requires_grad()) {
                           gb.row(j).noalias() += gk * av.row(i);
                         }
                       }
                       if (a.requires_grad()) tape.Accumulate(a, ga);
                       if (!same && b.requires_grad()) tape.Accumulate(b, gb);
                     });
}

// ---------------------------------------------------------------------------
// Gradient checking

GradCheckResult GradCheck(const LossFn& loss_fn, std::span<Parameter* const> params,
                          const GradCheckOptions& options) {
  for (Parameter* p : params) p->ZeroGrad();
  {
    Tape tape;
    Tensor loss = loss_fn(tape);
    tape.Backward(loss);
  }
  auto evaluate = [&loss_fn]() {
    Tape tape;
    return loss_fn(tape).item();
  };

  GradCheckResult result;
  for (Parameter* p : params) {
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
        const double saved = p->value(r, c);
        p->value(r, c) = saved + options.eps;
        const double up = evaluate();
        p->value(r, c) = saved - options.eps;
        const double down = evaluate();
        p->value(r, c) = saved;
        const double numeric = (up - down) / (2.0 * options.eps);
        const double analytic = p->grad(r, c);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), options.floor});
        const double err = std::abs(analytic - numeric) / denom;
        ++result.coordinates;
        if (err > result.max_rel_error || result.row < 0) {
          result.max_rel_error = err;
          result.parameter = p->name;
          result.row = r;
          result.col = c;
          result.analytic = analytic;
          result.numeric = numeric;
        }
      }
    }
  }
  return result;
}

void SetInjectedFault(InjectedFault fault) { g_fault.store(fault); }
InjectedFault GetInjectedFault() { return g_fault.load(); }

}  // namespace gmi
