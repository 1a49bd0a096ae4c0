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

#include "pairre/pairgraph.h"

#include <sstream>

#include "pairre/bind.h"
#include "pairre/error.h"

namespace pairre {

BilinearMode ParseBilinearMode(const std::string &name) {
  if (name == "vector") return BilinearMode::kVector;
  if (name == "scalar") return BilinearMode::kScalar;
  throw ConfigError("unknown bilinear mode '" + name + "' (expected vector|scalar)");
}

GnnSummand ParseGnnSummand(const std::string &name) {
  if (name == "neighbor") return GnnSummand::kNeighbor;
  if (name == "self") return GnnSummand::kSelf;
  throw ConfigError("unknown GNN summand '" + name + "' (expected neighbor|self)");
}

std::string ToString(BilinearMode mode) {
  return mode == BilinearMode::kVector ? "vector" : "scalar";
}

std::string ToString(GnnSummand summand) {
  return summand == GnnSummand::kNeighbor ? "neighbor" : "self";
}

int PairGraph::NodeIndex(int head, int tail) const {
  if (head == tail || head < 0 || tail < 0 || head >= num_entities ||
      tail >= num_entities) {
    throw Error("no node for pair (" + std::to_string(head) + "," +
                std::to_string(tail) + ")");
  }
  return head * (num_entities - 1) + (tail < head ? tail : tail - 1);
}

ad::Mask PairGraph::NeighborMask() const {
  ad::Mask mask = ad::Mask::Constant(size(), size(), false);
  for (int u = 0; u < size(); ++u) {
    for (int v : adjacency[u]) mask(v, u) = true;
  }
  return mask;
}

std::string PairGraph::ToText() const {
  std::ostringstream out;
  for (int u = 0; u < size(); ++u) {
    out << u << " (" << nodes[u].first << "," << nodes[u].second << "):";
    for (int v : adjacency[u]) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

PairGraph BuildPairGraph(int num_entities) {
  if (num_entities < 2) {
    throw Error("pair graph needs at least 2 entities, got " + std::to_string(num_entities));
  }
  PairGraph graph;
  graph.num_entities = num_entities;
  for (int h = 0; h < num_entities; ++h) {
    for (int t = 0; t < num_entities; ++t) {
      if (h != t) graph.nodes.push_back({h, t});
    }
  }
  const int n = graph.size();
  graph.adjacency.resize(n);
  for (int u = 0; u < n; ++u) {
    auto [h, t] = graph.nodes[u];
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      auto [a, b] = graph.nodes[v];
      if (a == h || a == t || b == h || b == t) graph.adjacency[u].push_back(v);
    }
  }
  return graph;
}

ad::Var PairEmbedding(ad::Var heads, ad::Var tails, ad::Var contexts,
                      const PairNodeVars &params, BilinearMode mode) {
  const int d = static_cast<int>(heads.rows());
  const int k = static_cast<int>(params.w_group.size());
  if (k == 0 || d % k != 0) {
    throw ConfigError("dimension " + std::to_string(d) + " is not divisible by " +
                      std::to_string(k) + " groups");
  }
  const int g = d / k;
  ad::Var zh = ad::Tanh(ad::Add(ad::MatMul(params.w_head, heads),
                                ad::MatMul(params.w_ctx_head, contexts)));
  ad::Var zt = ad::Tanh(ad::Add(ad::MatMul(params.w_tail, tails),
                                ad::MatMul(params.w_ctx_tail, contexts)));
  std::vector<ad::Var> blocks;
  for (int i = 0; i < k; ++i) {
    ad::Var mixed = ad::MatMul(params.w_group[i], ad::Rows(zt, i * g, g));
    blocks.push_back(ad::Hadamard(ad::Rows(zh, i * g, g), mixed));
  }
  if (mode == BilinearMode::kVector) return ad::Sigmoid(ad::ConcatRows(blocks));

  ad::Tape &tape = *heads.tape();
  ad::Var ones = tape.Constant(Eigen::MatrixXd::Ones(1, g));
  ad::Var total = ad::MatMul(ones, blocks[0]);
  for (int i = 1; i < k; ++i) total = ad::Add(total, ad::MatMul(ones, blocks[i]));
  return ad::Sigmoid(total);
}

Eigen::VectorXd PairEmbedding(const Eigen::VectorXd &head, const Eigen::VectorXd &tail,
                              const Eigen::VectorXd &context, const PairNodeParams &params,
                              BilinearMode mode) {
  ad::Tape tape;
  PairNodeVars vars = BindToTape(tape, params, false);
  return PairEmbedding(tape.Constant(head), tape.Constant(tail), tape.Constant(context), vars,
                       mode)
      .value()
      .col(0);
}

ad::Var InitNodes(ad::Var pair_embeddings, const std::vector<int> &head_types,
                  const std::vector<int> &tail_types, ad::Var coref) {
  const int n = static_cast<int>(pair_embeddings.cols());
  const int types = static_cast<int>(coref.cols());
  if (static_cast<int>(head_types.size()) != n || static_cast<int>(tail_types.size()) != n) {
    throw DimensionError("InitNodes needs one head and tail type per pair");
  }
  Eigen::MatrixXd head_onehot = Eigen::MatrixXd::Zero(types, n);
  Eigen::MatrixXd tail_onehot = Eigen::MatrixXd::Zero(types, n);
  for (int j = 0; j < n; ++j) {
    for (int type : {head_types[j], tail_types[j]}) {
      if (type < 0 || type >= types) {
        throw Error("unknown entity type " + std::to_string(type) + " (table has " +
                    std::to_string(types) + ")");
      }
    }
    head_onehot(head_types[j], j) = 1.0;
    tail_onehot(tail_types[j], j) = 1.0;
  }
  ad::Tape &tape = *pair_embeddings.tape();
  return ad::ConcatRows({ad::MatMul(coref, tape.Constant(std::move(head_onehot))),
                         pair_embeddings,
                         ad::MatMul(coref, tape.Constant(std::move(tail_onehot)))});
}

Eigen::VectorXd InitNode(const Eigen::VectorXd &pair_embedding, int head_type, int tail_type,
                         const PairNodeParams &params) {
  ad::Tape tape;
  return InitNodes(tape.Constant(pair_embedding), {head_type}, {tail_type},
                   tape.Constant(params.coref))
      .value()
      .col(0);
}

ad::Var GnnLayer(ad::Var nodes, const PairGraph &graph, const GnnLayerVars &layer,
                 GnnSummand summand, ad::Var *attention) {
  if (nodes.cols() != graph.size()) {
    throw DimensionError("GNN got " + std::to_string(nodes.cols()) + " nodes for a graph of " +
                         std::to_string(graph.size()));
  }
  ad::Tape &tape = *nodes.tape();
  // scores(v, u) = <Q P_v, K P_u>
  ad::Var scores = ad::MatMul(ad::Transpose(ad::MatMul(layer.query, nodes)),
                              ad::MatMul(layer.key, nodes));
  ad::Var alpha = ad::MaskedSoftmaxColumns(scores, graph.NeighborMask());
  if (attention != nullptr) *attention = alpha;

  ad::Var pooled;
  if (summand == GnnSummand::kNeighbor) {
    pooled = ad::MatMul(nodes, alpha);
  } else {
    ad::Var ones_row = tape.Constant(Eigen::MatrixXd::Ones(1, graph.size()));
    ad::Var ones_col = tape.Constant(Eigen::MatrixXd::Ones(nodes.rows(), 1));
    ad::Var mass = ad::MatMul(ones_row, alpha);  // 1 x N, column sums of alpha
    pooled = ad::Hadamard(nodes, ad::MatMul(ones_col, mass));
  }
  ad::Var message = ad::MatMul(layer.w_msg, pooled);
  ad::Var hidden = ad::Tanh(ad::AddBias(ad::MatMul(layer.ffn_in, message), layer.ffn_in_bias));
  ad::Var ffn = ad::AddBias(ad::MatMul(layer.ffn_out, hidden), layer.ffn_out_bias);
  return ad::LayerNormColumns(ad::Add(nodes, ffn), layer.norm_scale, layer.norm_shift);
}

ad::Var RunGnn(ad::Var nodes, const PairGraph &graph, const std::vector<GnnLayerVars> &layers,
               GnnSummand summand) {
  for (const GnnLayerVars &layer : layers) nodes = GnnLayer(nodes, graph, layer, summand);
  return nodes;
}

GnnLayerResult GnnLayer(const Eigen::MatrixXd &nodes, const PairGraph &graph,
                        const GnnLayerParams &layer, GnnSummand summand) {
  ad::Tape tape;
  ad::Var attention;
  ad::Var out = GnnLayer(tape.Constant(nodes), graph, BindToTape(tape, layer, false), summand,
                         &attention);
  return {out.value(), attention.value()};
}

Eigen::MatrixXd RunGnn(const Eigen::MatrixXd &nodes, const PairGraph &graph,
                       const std::vector<GnnLayerParams> &layers, GnnSummand summand) {
  ad::Tape tape;
  std::vector<GnnLayerVars> vars;
  for (const auto &layer : layers) vars.push_back(BindToTape(tape, layer, false));
  return RunGnn(tape.Constant(nodes), graph, vars, summand).value();
}

}  // namespace pairre
