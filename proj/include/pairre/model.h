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

#ifndef PAIRRE_MODEL_H_
#define PAIRRE_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pairre/autodiff.h"
#include "pairre/cgmi.h"
#include "pairre/classifier.h"
#include "pairre/corpus.h"
#include "pairre/encoder.h"
#include "pairre/pairgraph.h"

namespace pairre {

struct ModelConfig {
  int dim = 32;
  int groups = 4;
  int gnn_layers = 3;
  // Width of the per-type coreference embedding; -1 means dim / 6.
  int coref_dim = -1;
  int num_relations = 0;
  int num_types = 1;
  BilinearMode bilinear = BilinearMode::kVector;
  GnnSummand summand = GnnSummand::kNeighbor;
  // When false, entity embeddings are the plain mean of mention rows.
  bool mention_integration = true;

  int coref_width() const { return coref_dim >= 0 ? coref_dim : dim / 6; }
  int pair_dim() const { return bilinear == BilinearMode::kVector ? dim : 1; }
  int node_dim() const { return pair_dim() + 2 * coref_width(); }
  int num_outputs() const { return num_relations + 1; }

  // Throws ConfigError on inconsistent values.
  void Validate() const;
};

void to_json(nlohmann::json &j, const ModelConfig &cfg);
void from_json(const nlohmann::json &j, ModelConfig &cfg);

// Every trainable tensor of the model.
template <typename T>
struct ModelWeights {
  AttentionWeights<T> attention;
  PairNodeWeights<T> pair;
  std::vector<GnnLayerWeights<T>> gnn;
  ClassifierWeights<T> classifier;
};

template <typename>
inline constexpr bool kIsModelWeights = false;
template <typename T>
inline constexpr bool kIsModelWeights<ModelWeights<T>> = true;

template <typename P, typename F>
  requires kIsModelWeights<std::remove_const_t<P>>
void VisitFields(P &p, F &&f) {
  VisitFields(p.attention, f);
  VisitFields(p.pair, f);
  for (size_t l = 0; l < p.gnn.size(); ++l) {
    VisitFields(p.gnn[l], [&](const std::string &name, auto &field) {
      f("gnn." + std::to_string(l) + "." + name, field);
    });
  }
  VisitFields(p.classifier, f);
}

using ModelVars = ModelWeights<ad::Var>;

inline void ResizeLike(ModelVars &vars, const ModelWeights<Eigen::MatrixXd> &params) {
  vars.pair.w_group.resize(params.pair.w_group.size());
  vars.gnn.resize(params.gnn.size());
}

// Position of one tensor inside the flat parameter vector.
struct ParamSlot {
  std::string name;
  Eigen::Index offset;
  Eigen::Index rows;
  Eigen::Index cols;
};

class ModelParams : public ModelWeights<Eigen::MatrixXd> {
 public:
  ModelParams() = default;

  // Random orthogonal weight matrices, zero biases, unit layer-norm scale.
  static ModelParams Initialize(const ModelConfig &config, std::uint64_t seed);
  // All tensors zero (layer-norm scales one); used by tests.
  static ModelParams Zeros(const ModelConfig &config);

  const ModelConfig &config() const { return config_; }

  // Flat index: tensors in VisitFields order, each column-major.
  std::vector<ParamSlot> Layout() const;
  Eigen::Index NumParams() const;
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd &flat);
  // "name[row,col]" for a flat index.
  std::string NameOf(Eigen::Index index) const;

 private:
  explicit ModelParams(const ModelConfig &config);
  ModelConfig config_;
};

// A document together with its encoding, as consumed by the model.
struct ModelInput {
  const Document *doc = nullptr;
  const EncodedDocument *enc = nullptr;
};

struct ForwardResult {
  PairGraph graph;
  ad::Var logits;  // (R + 1) x N, column per graph node
  ad::Var loss;    // mean adaptive-threshold loss, valid if requested
  ad::Var heads;   // d x N pair-specific head embeddings
  ad::Var tails;
  ad::Var nodes;   // final node embeddings
  std::vector<Eigen::VectorXd> head_weights;  // mention weights per pair
  std::vector<Eigen::VectorXd> tail_weights;
  int degenerate_contexts = 0;
};

// Runs the whole head on one document. Requires at least two entities.
ForwardResult Forward(ad::Tape &tape, const ModelVars &vars, const ModelConfig &config,
                      const ModelInput &input, bool with_loss);

// Gold relation ids for every node of the document's pair graph.
std::vector<std::vector<int>> GoldPerPair(const Document &doc, const PairGraph &graph);

// Per-pair logits for one document without recording gradients.
std::vector<PairLogits> PredictDocument(const ModelParams &params, const ModelInput &input);

}  // namespace pairre

#endif  // PAIRRE_MODEL_H_
