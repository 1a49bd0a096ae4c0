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

#ifndef PAIRRE_PAIRGRAPH_H_
#define PAIRRE_PAIRGRAPH_H_

#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pairre/autodiff.h"

namespace pairre {

// How the group bilinear turns the two hidden vectors into a pair vector.
enum class BilinearMode {
  // Per group i: sigmoid(z_h^i * (W_p^i z_t^i)) elementwise, groups
  // concatenated to a d-vector.
  kVector,
  // Sum over groups of z_h^i' W_p^i z_t^i, squashed to one scalar.
  kScalar,
};

// Which embedding the neighborhood attention weights are applied to.
enum class GnnSummand {
  kNeighbor,  // sum_v alpha(u,v) P_v
  kSelf,      // sum_v alpha(u,v) P_u
};

BilinearMode ParseBilinearMode(const std::string &name);
GnnSummand ParseGnnSummand(const std::string &name);
std::string ToString(BilinearMode mode);
std::string ToString(GnnSummand summand);

template <typename T>
struct PairNodeWeights {
  T w_head;      // d x d
  T w_tail;      // d x d
  T w_ctx_head;  // d x d
  T w_ctx_tail;  // d x d
  std::vector<T> w_group;  // k blocks of (d/k) x (d/k)
  T coref;       // d_coref x num_types, one column per entity type
};

template <typename T>
struct GnnLayerWeights {
  T w_msg;     // d_node x d_node
  T query;     // d_node x d_node
  T key;       // d_node x d_node
  T ffn_in;    // d_node x d_node
  T ffn_in_bias;
  T ffn_out;   // d_node x d_node
  T ffn_out_bias;
  T norm_scale;
  T norm_shift;
};

template <typename>
inline constexpr bool kIsPairNodeWeights = false;
template <typename T>
inline constexpr bool kIsPairNodeWeights<PairNodeWeights<T>> = true;
template <typename>
inline constexpr bool kIsGnnLayerWeights = false;
template <typename T>
inline constexpr bool kIsGnnLayerWeights<GnnLayerWeights<T>> = true;

template <typename P, typename F>
  requires kIsPairNodeWeights<std::remove_const_t<P>>
void VisitFields(P &p, F &&f) {
  f("pair.w_head", p.w_head);
  f("pair.w_tail", p.w_tail);
  f("pair.w_ctx_head", p.w_ctx_head);
  f("pair.w_ctx_tail", p.w_ctx_tail);
  for (size_t i = 0; i < p.w_group.size(); ++i) {
    f("pair.w_group." + std::to_string(i), p.w_group[i]);
  }
  f("pair.coref", p.coref);
}

template <typename P, typename F>
  requires kIsGnnLayerWeights<std::remove_const_t<P>>
void VisitFields(P &p, F &&f) {
  f("w_msg", p.w_msg);
  f("query", p.query);
  f("key", p.key);
  f("ffn_in", p.ffn_in);
  f("ffn_in_bias", p.ffn_in_bias);
  f("ffn_out", p.ffn_out);
  f("ffn_out_bias", p.ffn_out_bias);
  f("norm_scale", p.norm_scale);
  f("norm_shift", p.norm_shift);
}

using PairNodeParams = PairNodeWeights<Eigen::MatrixXd>;
using PairNodeVars = PairNodeWeights<ad::Var>;
using GnnLayerParams = GnnLayerWeights<Eigen::MatrixXd>;
using GnnLayerVars = GnnLayerWeights<ad::Var>;

// Entity-pair graph: one node per ordered pair (h, t), h != t, edges
// between distinct nodes that share at least one entity.
struct PairGraph {
  int num_entities = 0;
  std::vector<std::pair<int, int>> nodes;
  std::vector<std::vector<int>> adjacency;  // sorted neighbor ids

  int size() const { return static_cast<int>(nodes.size()); }
  int NodeIndex(int head, int tail) const;
  // mask(v, u) is true iff v is a neighbor of u.
  ad::Mask NeighborMask() const;
  // One line per node: "id (h,t): n1 n2 ...".
  std::string ToText() const;
};

// Nodes are enumerated head-major: (0,1), (0,2), ..., (1,0), (1,2), ...
PairGraph BuildPairGraph(int num_entities);

// Batched pair embeddings; column j of `heads`, `tails` and `contexts`
// belongs to pair j. Returns d x N (vector mode) or 1 x N (scalar mode).
ad::Var PairEmbedding(ad::Var heads, ad::Var tails, ad::Var contexts,
                      const PairNodeVars &params, BilinearMode mode);

Eigen::VectorXd PairEmbedding(const Eigen::VectorXd &head, const Eigen::VectorXd &tail,
                              const Eigen::VectorXd &context, const PairNodeParams &params,
                              BilinearMode mode = BilinearMode::kVector);

// Initial node vectors [coref(head type); p; coref(tail type)].
ad::Var InitNodes(ad::Var pair_embeddings, const std::vector<int> &head_types,
                  const std::vector<int> &tail_types, ad::Var coref);

Eigen::VectorXd InitNode(const Eigen::VectorXd &pair_embedding, int head_type,
                         int tail_type, const PairNodeParams &params);

// One round of neighborhood attention, message transform, feed-forward,
// residual and layer normalization. Nodes are columns of `nodes`. If
// `attention` is non-null it receives the N x N weights, column u holding
// the distribution over u's neighbors.
ad::Var GnnLayer(ad::Var nodes, const PairGraph &graph, const GnnLayerVars &layer,
                 GnnSummand summand, ad::Var *attention = nullptr);

ad::Var RunGnn(ad::Var nodes, const PairGraph &graph, const std::vector<GnnLayerVars> &layers,
               GnnSummand summand);

struct GnnLayerResult {
  Eigen::MatrixXd nodes;
  Eigen::MatrixXd attention;
};

GnnLayerResult GnnLayer(const Eigen::MatrixXd &nodes, const PairGraph &graph,
                        const GnnLayerParams &layer,
                        GnnSummand summand = GnnSummand::kNeighbor);

Eigen::MatrixXd RunGnn(const Eigen::MatrixXd &nodes, const PairGraph &graph,
                       const std::vector<GnnLayerParams> &layers,
                       GnnSummand summand = GnnSummand::kNeighbor);

inline void ResizeLike(PairNodeVars &vars, const PairNodeParams &params) {
  vars.w_group.resize(params.w_group.size());
}

}  // namespace pairre

#endif  // PAIRRE_PAIRGRAPH_H_
