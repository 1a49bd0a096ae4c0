// Copyright 2026 The pairre Authors.
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

#include "pairre/autodiff.h"

#include <cmath>
#include <limits>

#include "pairre/error.h"

namespace pairre {
namespace ad {

const Matrix &Var::value() const { return tape_->value(id_); }
const Matrix &Var::grad() const { return tape_->grad(id_); }

Var Tape::Constant(Matrix value) { return Push("constant", std::move(value), {}, nullptr); }

Var Tape::Variable(Matrix value) {
  Var v = Push("variable", std::move(value), {}, nullptr);
  nodes_[v.id()].requires_grad = true;
  return v;
}

Var Tape::Push(const char *op, Matrix value, std::vector<int> inputs, Backward backward) {
  if (!value.allFinite()) {
    throw NonFiniteError(std::string("non-finite value produced by ") + op);
  }
  Node node;
  node.op = op;
  node.value = std::move(value);
  for (int in : inputs) node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  node.inputs = std::move(inputs);
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

void Tape::Backprop(Var output) {
  if (output.rows() != 1 || output.cols() != 1) {
    throw Error("Backprop needs a scalar output");
  }
  for (Node &node : nodes_) {
    if (node.requires_grad) node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  }
  if (!nodes_[output.id()].requires_grad) return;
  nodes_[output.id()].grad(0, 0) = 1.0;
  for (int id = output.id(); id >= 0; --id) {
    Node &node = nodes_[id];
    if (node.requires_grad && node.backward) node.backward(*this, id);
  }
}

namespace {

Tape &TapeOf(Var a) { return *a.tape(); }

}  // namespace

Var MatMul(Var a, Var b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("MatMul " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " by " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
  }
  int ia = a.id(), ib = b.id();
  return TapeOf(a).Push("matmul", a.value() * b.value(), {ia, ib},
                        [ia, ib](Tape &t, int self) {
                          const Matrix &g = t.grad(self);
                          if (t.requires_grad(ia)) t.grad_ref(ia).noalias() += g * t.value(ib).transpose();
                          if (t.requires_grad(ib)) t.grad_ref(ib).noalias() += t.value(ia).transpose() * g;
                        });
}

Var Transpose(Var a) {
  int ia = a.id();
  return TapeOf(a).Push("transpose", a.value().transpose(), {ia},
                        [ia](Tape &t, int self) { t.grad_ref(ia) += t.grad(self).transpose(); });
}

Var Add(Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("Add shape mismatch");
  int ia = a.id(), ib = b.id();
  return TapeOf(a).Push("add", a.value() + b.value(), {ia, ib}, [ia, ib](Tape &t, int self) {
    if (t.requires_grad(ia)) t.grad_ref(ia) += t.grad(self);
    if (t.requires_grad(ib)) t.grad_ref(ib) += t.grad(self);
  });
}

Var AddBias(Var a, Var bias) {
  if (bias.cols() != 1 || bias.rows() != a.rows()) throw DimensionError("AddBias shape mismatch");
  int ia = a.id(), ib = bias.id();
  Matrix out = a.value().colwise() + bias.value().col(0);
  return TapeOf(a).Push("add_bias", std::move(out), {ia, ib}, [ia, ib](Tape &t, int self) {
    if (t.requires_grad(ia)) t.grad_ref(ia) += t.grad(self);
    if (t.requires_grad(ib)) t.grad_ref(ib) += t.grad(self).rowwise().sum();
  });
}

Var Hadamard(Var a, Var b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("Hadamard shape mismatch");
  int ia = a.id(), ib = b.id();
  return TapeOf(a).Push("hadamard", a.value().cwiseProduct(b.value()), {ia, ib},
                        [ia, ib](Tape &t, int self) {
                          const Matrix &g = t.grad(self);
                          if (t.requires_grad(ia)) t.grad_ref(ia) += g.cwiseProduct(t.value(ib));
                          if (t.requires_grad(ib)) t.grad_ref(ib) += g.cwiseProduct(t.value(ia));
                        });
}

Var Scale(Var a, double s) {
  int ia = a.id();
  return TapeOf(a).Push("scale", a.value() * s, {ia},
                        [ia, s](Tape &t, int self) { t.grad_ref(ia) += s * t.grad(self); });
}

Var Tanh(Var a) {
  int ia = a.id();
  return TapeOf(a).Push("tanh", a.value().array().tanh().matrix(), {ia}, [ia](Tape &t, int self) {
    const Matrix &y = t.value(self);
    t.grad_ref(ia).array() += t.grad(self).array() * (1.0 - y.array().square());
  });
}

Var Sigmoid(Var a) {
  int ia = a.id();
  Matrix y = (1.0 + (-a.value().array()).exp()).inverse().matrix();
  return TapeOf(a).Push("sigmoid", std::move(y), {ia}, [ia](Tape &t, int self) {
    const Matrix &y = t.value(self);
    t.grad_ref(ia).array() += t.grad(self).array() * y.array() * (1.0 - y.array());
  });
}

namespace {

void SoftmaxBackward(Tape &t, int self, int ia) {
  const Matrix &y = t.value(self);
  const Matrix &g = t.grad(self);
  Matrix &gx = t.grad_ref(ia);
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    double dot = g.col(c).dot(y.col(c));
    gx.col(c).array() += y.col(c).array() * (g.col(c).array() - dot);
  }
}

}  // namespace

Var SoftmaxColumns(Var a) {
  const Matrix &x = a.value();
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::ArrayXd e = (x.col(c).array() - x.col(c).maxCoeff()).exp();
    y.col(c) = (e / e.sum()).matrix();
  }
  int ia = a.id();
  return TapeOf(a).Push("softmax", std::move(y), {ia},
                        [ia](Tape &t, int self) { SoftmaxBackward(t, self, ia); });
}

Var MaskedSoftmaxColumns(Var a, const Mask &mask) {
  const Matrix &x = a.value();
  if (mask.rows() != x.rows() || mask.cols() != x.cols()) {
    throw DimensionError("softmax mask shape mismatch");
  }
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (mask(r, c)) mx = std::max(mx, x(r, c));
    }
    if (!std::isfinite(mx)) continue;
    double sum = 0.0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (mask(r, c)) sum += (y(r, c) = std::exp(x(r, c) - mx));
    }
    y.col(c) /= sum;
  }
  int ia = a.id();
  return TapeOf(a).Push("masked_softmax", std::move(y), {ia},
                        [ia](Tape &t, int self) { SoftmaxBackward(t, self, ia); });
}

Var LayerNormColumns(Var x, Var gamma, Var beta, double eps) {
  const Matrix &v = x.value();
  const Eigen::Index n = v.rows();
  if (gamma.rows() != n || beta.rows() != n || gamma.cols() != 1 || beta.cols() != 1) {
    throw DimensionError("layer norm parameter shape mismatch");
  }
  Matrix xhat(n, v.cols());
  Eigen::VectorXd inv_std(v.cols());
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    double mean = v.col(c).mean();
    Eigen::VectorXd centered = v.col(c).array() - mean;
    double var = centered.squaredNorm() / n;
    inv_std[c] = 1.0 / std::sqrt(var + eps);
    xhat.col(c) = centered * inv_std[c];
  }
  Matrix y = (xhat.array().colwise() * gamma.value().col(0).array()).matrix();
  y.colwise() += beta.value().col(0);
  int ix = x.id(), ig = gamma.id(), ib = beta.id();
  return TapeOf(x).Push(
      "layer_norm", std::move(y), {ix, ig, ib},
      [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape &t, int self) {
        const Matrix &g = t.grad(self);
        if (t.requires_grad(ig)) t.grad_ref(ig) += g.cwiseProduct(xhat).rowwise().sum();
        if (t.requires_grad(ib)) t.grad_ref(ib) += g.rowwise().sum();
        if (!t.requires_grad(ix)) return;
        const Eigen::ArrayXd gam = t.value(ig).col(0).array();
        Matrix &gx = t.grad_ref(ix);
        const double n = static_cast<double>(xhat.rows());
        for (Eigen::Index c = 0; c < xhat.cols(); ++c) {
          Eigen::ArrayXd dxhat = g.col(c).array() * gam;
          double m1 = dxhat.sum() / n;
          double m2 = (dxhat * xhat.col(c).array()).sum() / n;
          gx.col(c).array() += inv_std[c] * (dxhat - m1 - xhat.col(c).array() * m2);
        }
      });
}

Var Rows(Var a, int begin, int count) {
  if (begin < 0 || count < 0 || begin + count > a.rows()) throw DimensionError("Rows out of range");
  int ia = a.id();
  return TapeOf(a).Push("rows", a.value().middleRows(begin, count), {ia},
                        [ia, begin, count](Tape &t, int self) {
                          t.grad_ref(ia).middleRows(begin, count) += t.grad(self);
                        });
}

Var Column(Var a, int col) {
  if (col < 0 || col >= a.cols()) throw DimensionError("Column out of range");
  int ia = a.id();
  return TapeOf(a).Push("column", a.value().col(col), {ia}, [ia, col](Tape &t, int self) {
    t.grad_ref(ia).col(col) += t.grad(self).col(0);
  });
}

Var ConcatRows(const std::vector<Var> &parts) {
  if (parts.empty()) throw DimensionError("ConcatRows of nothing");
  Eigen::Index rows = 0, cols = parts[0].cols();
  std::vector<int> ids;
  for (const Var &p : parts) {
    if (p.cols() != cols) throw DimensionError("ConcatRows column mismatch");
    rows += p.rows();
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const Var &p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  return TapeOf(parts[0]).Push("concat_rows", std::move(out), ids, [ids](Tape &t, int self) {
    Eigen::Index r = 0;
    for (int id : ids) {
      Eigen::Index n = t.value(id).rows();
      if (t.requires_grad(id)) t.grad_ref(id) += t.grad(self).middleRows(r, n);
      r += n;
    }
  });
}

Var ConcatCols(const std::vector<Var> &parts) {
  if (parts.empty()) throw DimensionError("ConcatCols of nothing");
  Eigen::Index rows = parts[0].rows(), cols = 0;
  std::vector<int> ids;
  for (const Var &p : parts) {
    if (p.rows() != rows) throw DimensionError("ConcatCols row mismatch");
    cols += p.cols();
    ids.push_back(p.id());
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const Var &p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return TapeOf(parts[0]).Push("concat_cols", std::move(out), ids, [ids](Tape &t, int self) {
    Eigen::Index c = 0;
    for (int id : ids) {
      Eigen::Index n = t.value(id).cols();
      if (t.requires_grad(id)) t.grad_ref(id) += t.grad(self).middleCols(c, n);
      c += n;
    }
  });
}

Var Sum(Var a) {
  int ia = a.id();
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return TapeOf(a).Push("sum", std::move(out), {ia}, [ia](Tape &t, int self) {
    t.grad_ref(ia).array() += t.grad(self)(0, 0);
  });
}

}  // namespace ad
}  // namespace pairre
