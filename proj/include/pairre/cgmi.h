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

#ifndef PAIRRE_CGMI_H_
#define PAIRRE_CGMI_H_

#include <type_traits>

#include <Eigen/Dense>

#include "pairre/autodiff.h"
#include "pairre/encoder.h"

namespace pairre {

// Query and key maps scoring mentions against a pair context.
template <typename T>
struct AttentionWeights {
  T query;  // d x d
  T key;    // d x d
};

template <typename>
inline constexpr bool kIsAttentionWeights = false;
template <typename T>
inline constexpr bool kIsAttentionWeights<AttentionWeights<T>> = true;

// Calls f(name, field) for every tensor, in checkpoint order.
template <typename P, typename F>
  requires kIsAttentionWeights<std::remove_const_t<P>>
void VisitFields(P &p, F &&f) {
  f("attention.query", p.query);
  f("attention.key", p.key);
}

using AttentionParams = AttentionWeights<Eigen::MatrixXd>;
using AttentionVars = AttentionWeights<ad::Var>;

// Token distribution shared by a head and tail entity, and the context
// vector it pools from H.
struct PairContext {
  Eigen::VectorXd c;  // d
  Eigen::VectorXd a;  // n, on the simplex
  // True when the two attention profiles have disjoint support and `a` fell
  // back to uniform weights over both entities' mention rows.
  bool degenerate = false;
};

// Mean of the attention rows at the entity's mention start markers.
Eigen::VectorXd EntityAttention(const EncodedDocument &enc, int entity);

// a = (A_h * A_t) / sum(A_h * A_t), c = sum_j a_j H_j.
PairContext ComputePairContext(const EncodedDocument &enc, int head, int tail);

// Start-marker rows of H for one entity, one column per mention (d x p).
Eigen::MatrixXd MentionRows(const EncodedDocument &enc, int entity);

// Cross-attention pooling of mention embeddings guided by a context.
//
// The score of mention i is the query-key dot product
//   <W_Q c, W_K h_i> / sqrt(d),
// the weights are the softmax of the scores over the entity's mentions and
// the result is sum_i weight_i h_i. `context` is d x 1, `mentions` is d x p.
// If `weights` is non-null it receives the p x 1 weight vector.
ad::Var IntegrateMentions(ad::Var context, ad::Var mentions, ad::Var query, ad::Var key,
                          ad::Var *weights = nullptr);

struct MentionIntegration {
  Eigen::VectorXd embedding;
  Eigen::VectorXd weights;
};

MentionIntegration IntegrateMentions(const Eigen::VectorXd &context,
                                     const Eigen::MatrixXd &mentions,
                                     const AttentionParams &params);

struct PairEntityEmbedding {
  Eigen::VectorXd head;
  Eigen::VectorXd tail;
  Eigen::VectorXd head_weights;
  Eigen::VectorXd tail_weights;
  PairContext context;
};

// Pair context plus head and tail integration with shared query/key maps.
PairEntityEmbedding PairEntities(const EncodedDocument &enc, int head, int tail,
                                 const AttentionParams &params);

}  // namespace pairre

#endif  // PAIRRE_CGMI_H_
