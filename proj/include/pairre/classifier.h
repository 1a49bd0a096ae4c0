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

#ifndef PAIRRE_CLASSIFIER_H_
#define PAIRRE_CLASSIFIER_H_

#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "pairre/autodiff.h"

namespace pairre {

// Two-layer relation scorer over [e_head; e_tail; P_final]. The output has
// R + 1 logits; index R is the learned threshold class.
template <typename T>
struct ClassifierWeights {
  T w_hidden;  // (2d + d_node) x d
  T b_hidden;  // d x 1
  T w_out;     // d x (R + 1)
  T b_out;     // (R + 1) x 1
};

template <typename>
inline constexpr bool kIsClassifierWeights = false;
template <typename T>
inline constexpr bool kIsClassifierWeights<ClassifierWeights<T>> = true;

template <typename P, typename F>
  requires kIsClassifierWeights<std::remove_const_t<P>>
void VisitFields(P &p, F &&f) {
  f("classifier.w_hidden", p.w_hidden);
  f("classifier.b_hidden", p.b_hidden);
  f("classifier.w_out", p.w_out);
  f("classifier.b_out", p.b_out);
}

using ClassifierParams = ClassifierWeights<Eigen::MatrixXd>;
using ClassifierVars = ClassifierWeights<ad::Var>;

struct PairLogits {
  Eigen::VectorXd logits;  // R + 1 entries, threshold last
  int head = -1;
  int tail = -1;

  int num_relations() const { return static_cast<int>(logits.size()) - 1; }
  double threshold() const { return logits[logits.size() - 1]; }
};

// logits = W_out' tanh(W_hidden' [heads; tails; nodes] + b_hidden) + b_out
// for every column. Returns (R + 1) x N.
ad::Var RelationLogits(ad::Var heads, ad::Var tails, ad::Var nodes,
                       const ClassifierVars &params);

PairLogits ComputePairLogits(const Eigen::VectorXd &head, const Eigen::VectorXd &tail,
                             const Eigen::VectorXd &node, const ClassifierParams &params);

// Logistic probabilities of the logits, for reporting only.
Eigen::VectorXd RelationProbabilities(const Eigen::VectorXd &logits);

// Adaptive-threshold loss for one pair. With P the gold relations and N
// the remaining ones:
//   -sum_{r in P} log softmax_{P + TH}(r) - log softmax_{N + TH}(TH).
// `gold` holds relation ids in [0, R); the threshold index R is rejected.
// If `grad` is non-null it receives d loss / d logits.
double AtlLoss(const Eigen::VectorXd &logits, const std::vector<int> &gold,
               Eigen::VectorXd *grad = nullptr);

// Mean adaptive-threshold loss over the columns of a logit matrix.
ad::Var MeanAtlLoss(ad::Var logits, const std::vector<std::vector<int>> &gold);

// Relations whose logit is strictly above the threshold logit.
std::vector<int> PredictRelations(const Eigen::VectorXd &logits);

}  // namespace pairre

#endif  // PAIRRE_CLASSIFIER_H_
