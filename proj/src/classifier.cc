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

#include "pairre/classifier.h"

#include <cmath>
#include <string>

#include "pairre/bind.h"
#include "pairre/error.h"

namespace pairre {

ad::Var RelationLogits(ad::Var heads, ad::Var tails, ad::Var nodes,
                       const ClassifierVars &params) {
  ad::Var features = ad::ConcatRows({heads, tails, nodes});
  if (features.rows() != params.w_hidden.rows()) {
    throw DimensionError("classifier expects " + std::to_string(params.w_hidden.rows()) +
                         " input features, got " + std::to_string(features.rows()));
  }
  ad::Var hidden = ad::Tanh(
      ad::AddBias(ad::MatMul(ad::Transpose(params.w_hidden), features), params.b_hidden));
  return ad::AddBias(ad::MatMul(ad::Transpose(params.w_out), hidden), params.b_out);
}

PairLogits ComputePairLogits(const Eigen::VectorXd &head, const Eigen::VectorXd &tail,
                             const Eigen::VectorXd &node, const ClassifierParams &params) {
  ad::Tape tape;
  ad::Var out = RelationLogits(tape.Constant(head), tape.Constant(tail), tape.Constant(node),
                               BindToTape(tape, params, false));
  PairLogits pl;
  pl.logits = out.value().col(0);
  return pl;
}

Eigen::VectorXd RelationProbabilities(const Eigen::VectorXd &logits) {
  return (1.0 + (-logits.array()).exp()).inverse().matrix();
}

namespace {

// -log softmax over `members` evaluated at each member, returned through
// `probs` (softmax values) and the log-sum-exp.
double LogSumExp(const Eigen::VectorXd &logits, const std::vector<int> &members,
                 std::vector<double> *probs) {
  double mx = -INFINITY;
  for (int r : members) mx = std::max(mx, logits[r]);
  double sum = 0.0;
  for (int r : members) sum += std::exp(logits[r] - mx);
  double lse = mx + std::log(sum);
  probs->clear();
  for (int r : members) probs->push_back(std::exp(logits[r] - lse));
  return lse;
}

}  // namespace

double AtlLoss(const Eigen::VectorXd &logits, const std::vector<int> &gold,
               Eigen::VectorXd *grad) {
  const int th = static_cast<int>(logits.size()) - 1;
  if (th < 0) throw Error("empty logit vector");
  std::vector<bool> positive(th + 1, false);
  for (int r : gold) {
    if (r == th) throw Error("threshold class cannot be a gold relation");
    if (r < 0 || r > th) throw Error("gold relation " + std::to_string(r) + " out of range");
    positive[r] = true;
  }
  std::vector<int> pos_set, neg_set;
  for (int r = 0; r < th; ++r) (positive[r] ? pos_set : neg_set).push_back(r);
  const int num_pos = static_cast<int>(pos_set.size());
  pos_set.push_back(th);
  neg_set.push_back(th);

  if (grad != nullptr) *grad = Eigen::VectorXd::Zero(logits.size());
  std::vector<double> probs;
  double loss = 0.0;
  if (num_pos > 0) {
    double lse = LogSumExp(logits, pos_set, &probs);
    for (int i = 0; i < num_pos; ++i) loss += lse - logits[pos_set[i]];
    if (grad != nullptr) {
      for (size_t i = 0; i < pos_set.size(); ++i) {
        (*grad)[pos_set[i]] += num_pos * probs[i] - (pos_set[i] == th ? 0.0 : 1.0);
      }
    }
  }
  double lse = LogSumExp(logits, neg_set, &probs);
  loss += lse - logits[th];
  if (grad != nullptr) {
    for (size_t i = 0; i < neg_set.size(); ++i) {
      (*grad)[neg_set[i]] += probs[i] - (neg_set[i] == th ? 1.0 : 0.0);
    }
  }
  return loss;
}

ad::Var MeanAtlLoss(ad::Var logits, const std::vector<std::vector<int>> &gold) {
  const int n = static_cast<int>(logits.cols());
  if (static_cast<int>(gold.size()) != n) {
    throw DimensionError("one gold set per logit column required");
  }
  Eigen::MatrixXd grads(logits.rows(), n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd g;
    total += AtlLoss(logits.value().col(j), gold[j], &g);
    grads.col(j) = g / n;
  }
  Eigen::MatrixXd out(1, 1);
  out(0, 0) = total / n;
  int id = logits.id();
  return logits.tape()->Push("atl_loss", std::move(out), {id},
                             [id, grads = std::move(grads)](ad::Tape &t, int self) {
                               t.grad_ref(id) += t.grad(self)(0, 0) * grads;
                             });
}

std::vector<int> PredictRelations(const Eigen::VectorXd &logits) {
  std::vector<int> out;
  const int th = static_cast<int>(logits.size()) - 1;
  for (int r = 0; r < th; ++r) {
    if (logits[r] > logits[th]) out.push_back(r);
  }
  return out;
}

}  // namespace pairre
