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

#ifndef PAIRRE_AUTODIFF_H_
#define PAIRRE_AUTODIFF_H_

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pairre {
namespace ad {

using Matrix = Eigen::MatrixXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

class Tape;

// Handle to a value recorded on a tape. Cheap to copy.
class Var {
 public:
  Var() = default;
  Var(Tape *tape, int id) : tape_(tape), id_(id) {}

  const Matrix &value() const;
  const Matrix &grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const { return value()(0, 0); }

  Tape *tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape *tape_ = nullptr;
  int id_ = -1;
};

// Records matrix operations in evaluation order and replays them in
// reverse to accumulate gradients. Values are column-major Eigen
// matrices; vectors are single columns.
class Tape {
 public:
  // Accumulates gradients of this node into its inputs. Called only when
  // the node requires a gradient.
  using Backward = std::function<void(Tape &tape, int self)>;

  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Matrix value);
  Var Variable(Matrix value);

  // Appends an operation node. Throws NonFiniteError naming `op` if the
  // value contains NaN or infinity.
  Var Push(const char *op, Matrix value, std::vector<int> inputs, Backward backward);

  // Seeds d(output)/d(output) = 1 for a 1x1 output and propagates.
  void Backprop(Var output);

  const Matrix &value(int id) const { return nodes_[id].value; }
  const Matrix &grad(int id) const { return nodes_[id].grad; }
  // Gradient buffer of an input; zero-sized if the input needs no gradient.
  Matrix &grad_ref(int id) { return nodes_[id].grad; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  const char *op(int id) const { return nodes_[id].op; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    const char *op;
    Matrix value;
    Matrix grad;
    std::vector<int> inputs;
    Backward backward;
    bool requires_grad = false;
  };
  // deque keeps references to earlier nodes stable while pushing.
  std::deque<Node> nodes_;
};

Var MatMul(Var a, Var b);
Var Transpose(Var a);
Var Add(Var a, Var b);
// Adds the column vector `bias` to every column of `a`.
Var AddBias(Var a, Var bias);
Var Hadamard(Var a, Var b);
Var Scale(Var a, double s);
Var Tanh(Var a);
Var Sigmoid(Var a);
// Softmax over each column.
Var SoftmaxColumns(Var a);
// Softmax over the entries of each column where `mask` is true. Masked
// entries get weight 0; a column without any true entry becomes zero.
Var MaskedSoftmaxColumns(Var a, const Mask &mask);
// Per-column layer normalization followed by the affine map
// gamma * x_hat + beta.
Var LayerNormColumns(Var x, Var gamma, Var beta, double eps = 1e-5);
Var Rows(Var a, int begin, int count);
Var Column(Var a, int col);
Var ConcatRows(const std::vector<Var> &parts);
Var ConcatCols(const std::vector<Var> &parts);
Var Sum(Var a);

}  // namespace ad
}  // namespace pairre

#endif  // PAIRRE_AUTODIFF_H_
