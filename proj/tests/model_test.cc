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

#include <numeric>
#include <random>

#include "doctest.h"
#include "pairre/bind.h"
#include "pairre/error.h"
#include "pairre/model.h"
#include "pairre/pipeline.h"
#include "pairre/training.h"
#include "test_util.h"

namespace pairre {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Fixture {
  Corpus corpus;
  std::vector<EncodedDocument> encodings;
  std::vector<ModelInput> inputs;
  ModelConfig model;

  Fixture(int dim, int num_docs, double fact_rate = 1.0, std::uint64_t seed = 11) {
    SynthConfig sc;
    sc.num_docs = num_docs;
    sc.entities_per_doc = 3;
    sc.num_relations = 3;
    sc.num_types = 2;
    sc.mentions_per_entity = 2;
    sc.sentences_per_doc = 2;
    sc.trigger_length = 1;
    sc.min_filler = 1;
    sc.max_filler = 2;
    sc.fact_rate = fact_rate;
    sc.seed = seed;
    corpus = SynthCorpus(sc);
    EncoderConfig ec;
    ec.dim = dim;
    encodings = EncodeCorpus(corpus, ec);
    inputs = MakeInputs(corpus, encodings);
    model.dim = dim;
    model.groups = 2;
    model.gnn_layers = 1;
    model.num_relations = corpus.num_relations;
    model.num_types = corpus.num_types;
  }
};

TEST_CASE("ModelConfig derived widths and validation") {
  ModelConfig cfg;
  cfg.dim = 12;
  cfg.groups = 3;
  cfg.num_relations = 2;
  CHECK(cfg.coref_width() == 2);
  CHECK(cfg.node_dim() == 16);
  cfg.bilinear = BilinearMode::kScalar;
  CHECK(cfg.node_dim() == 5);
  CHECK_NOTHROW(cfg.Validate());
  cfg.groups = 5;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg.groups = 3;
  cfg.num_relations = 0;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg.num_relations = 2;
  cfg.gnn_layers = -1;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  nlohmann::json j = ModelConfig{};
  CHECK(j.get<ModelConfig>().dim == ModelConfig{}.dim);
}

TEST_CASE("flat index is a bijection over all tensors") {
  Fixture fx(8, 1);
  ModelParams params = ModelParams::Initialize(fx.model, 3);
  Eigen::Index total = 0;
  Eigen::Index expected_offset = 0;
  for (const ParamSlot &slot : params.Layout()) {
    CHECK(slot.offset == expected_offset);
    expected_offset += slot.rows * slot.cols;
    total += slot.rows * slot.cols;
  }
  CHECK(params.NumParams() == total);
  VectorXd flat = params.Flatten();
  VectorXd probe = VectorXd::LinSpaced(flat.size(), 1.0, static_cast<double>(flat.size()));
  ModelParams copy = params;
  copy.Unflatten(probe);
  CHECK(copy.Flatten() == probe);
  copy.Unflatten(flat);
  CHECK(copy.Flatten() == flat);
  CHECK(params.NameOf(0) == "attention.query[0,0]");
  CHECK(params.NameOf(1) == "attention.query[1,0]");
  CHECK(params.NameOf(8) == "attention.query[0,1]");
  CHECK_THROWS_AS(copy.Unflatten(VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("orthogonal initialization") {
  Fixture fx(16, 1);
  ModelParams params = ModelParams::Initialize(fx.model, 5);
  int checked = 0;
  VisitFields(static_cast<const ModelWeights<MatrixXd> &>(params),
              [&](const std::string &name, const MatrixXd &m) {
                INFO(name);
                if (m.cols() == 1) {
                  const bool scale = name.find("norm_scale") != std::string::npos;
                  CHECK(m == (scale ? MatrixXd::Ones(m.rows(), 1) : MatrixXd::Zero(m.rows(), 1)));
                  return;
                }
                MatrixXd gram = m.rows() >= m.cols() ? MatrixXd(m.transpose() * m)
                                                     : MatrixXd(m * m.transpose());
                CHECK((gram - MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
                      1e-6);
                ++checked;
              });
  CHECK(checked > 10);
  CHECK(ModelParams::Initialize(fx.model, 5).Flatten() == params.Flatten());
  CHECK(ModelParams::Initialize(fx.model, 6).Flatten() != params.Flatten());
}

TEST_CASE("zero classifier weights reduce the loss to the output bias") {
  Fixture fx(8, 2);
  ModelParams params = ModelParams::Initialize(fx.model, 1);
  params.classifier.w_hidden.setZero();
  params.classifier.w_out.setZero();
  params.classifier.b_out << 0.4, -0.3, 1.2, 0.1;
  for (const ModelInput &input : fx.inputs) {
    PairGraph graph = BuildPairGraph(input.doc->num_entities());
    double expected = 0.0;
    for (const auto &gold : GoldPerPair(*input.doc, graph)) {
      expected += AtlLoss(params.classifier.b_out.col(0), gold);
    }
    expected /= graph.size();
    CHECK(std::abs(LossAndGradient(params, {input}, 1, nullptr) - expected) < 1e-12);
  }
}

TEST_CASE("batch loss is the mean of single-document losses") {
  Fixture fx(16, 2);
  ModelParams params = ModelParams::Initialize(fx.model, 2);
  VectorXd g0, g1, g01, gdup;
  const double l0 = LossAndGradient(params, {fx.inputs[0]}, 1, &g0);
  const double l1 = LossAndGradient(params, {fx.inputs[1]}, 1, &g1);
  const double l01 = LossAndGradient(params, fx.inputs, 2, &g01);
  CHECK(std::abs(l01 - (l0 + l1) / 2.0) < 1e-12);
  CHECK((g01 - (g0 + g1) / 2.0).cwiseAbs().maxCoeff() < 1e-12);
  const double ldup = LossAndGradient(params, {fx.inputs[0], fx.inputs[0]}, 1, &gdup);
  CHECK(ldup == l0);
  CHECK((gdup - g0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("documents with fewer than two entities are skipped") {
  Fixture fx(8, 1);
  ModelParams params = ModelParams::Initialize(fx.model, 2);
  Document lone = testing::MakeDocument("lone", {4}, {{{0, 1, 2}}});
  Corpus c;
  c.num_relations = fx.corpus.num_relations;
  c.num_types = fx.corpus.num_types;
  c.docs = {lone};
  EncoderConfig ec;
  ec.dim = 8;
  auto enc = EncodeCorpus(c, ec);
  auto lone_inputs = MakeInputs(c, enc);
  const double base = LossAndGradient(params, fx.inputs, 1, nullptr);
  std::vector<ModelInput> mixed = {fx.inputs[0], lone_inputs[0]};
  CHECK(LossAndGradient(params, mixed, 1, nullptr) == base);
}

TEST_CASE("plateau gradient has the forced softmax structure") {
  Fixture fx(8, 1, 0.0);
  REQUIRE(fx.corpus.docs[0].gold_facts.empty());
  ModelParams params = ModelParams::Zeros(fx.model);
  VectorXd grad;
  const double loss = LossAndGradient(params, fx.inputs, 1, &grad);
  const int r = fx.model.num_relations;
  CHECK(std::abs(loss - std::log(r + 1.0)) < 1e-12);
  ModelParams g = params;
  g.Unflatten(grad);
  for (int i = 0; i < r; ++i) CHECK(std::abs(g.classifier.b_out(i, 0) - 1.0 / (r + 1)) < 1e-12);
  CHECK(std::abs(g.classifier.b_out(r, 0) + static_cast<double>(r) / (r + 1)) < 1e-12);
  CHECK(g.classifier.w_out.isZero(0.0));
}

TEST_CASE("unused parameters receive exactly zero gradient") {
  Fixture fx(8, 2);
  fx.model.mention_integration = false;
  ModelParams params = ModelParams::Initialize(fx.model, 4);
  VectorXd grad;
  LossAndGradient(params, fx.inputs, 1, &grad);
  ModelParams g = params;
  g.Unflatten(grad);
  CHECK(g.attention.query.isZero(0.0));
  CHECK(g.attention.key.isZero(0.0));
  CHECK(!g.pair.w_head.isZero(0.0));
}

TEST_CASE("mean pooling averages the mention rows") {
  Fixture fx(8, 2);
  fx.model.mention_integration = false;
  ModelParams params = ModelParams::Initialize(fx.model, 4);
  for (const ModelInput &input : fx.inputs) {
    ad::Tape tape;
    ModelVars vars = BindToTape(tape, static_cast<const ModelWeights<MatrixXd> &>(params), false);
    ForwardResult fr = Forward(tape, vars, fx.model, input, false);
    for (int u = 0; u < fr.graph.size(); ++u) {
      const auto [h, t] = fr.graph.nodes[u];
      VectorXd head = VectorXd::Zero(8), tail = VectorXd::Zero(8);
      for (int row : input.enc->mention_starts[h]) head += input.enc->H.row(row).transpose();
      for (int row : input.enc->mention_starts[t]) tail += input.enc->H.row(row).transpose();
      head /= static_cast<double>(input.enc->mention_starts[h].size());
      tail /= static_cast<double>(input.enc->mention_starts[t].size());
      CHECK((VectorXd(fr.heads.value().col(u)) - head).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((VectorXd(fr.tails.value().col(u)) - tail).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("PredictDocument agrees with the recorded forward pass") {
  Fixture fx(8, 1);
  ModelParams params = ModelParams::Initialize(fx.model, 8);
  ad::Tape tape;
  ModelVars vars = BindToTape(tape, static_cast<const ModelWeights<MatrixXd> &>(params), false);
  ForwardResult fr = Forward(tape, vars, fx.model, fx.inputs[0], false);
  std::vector<PairLogits> pls = PredictDocument(params, fx.inputs[0]);
  REQUIRE(static_cast<int>(pls.size()) == fr.graph.size());
  for (int u = 0; u < fr.graph.size(); ++u) {
    CHECK(pls[u].head == fr.graph.nodes[u].first);
    CHECK(pls[u].tail == fr.graph.nodes[u].second);
    CHECK(pls[u].logits == VectorXd(fr.logits.value().col(u)));
    CHECK(std::abs(fr.head_weights[u].sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("logits are equivariant under entity relabeling") {
  Fixture fx(16, 4);
  fx.model.gnn_layers = 2;
  ModelParams params = ModelParams::Initialize(fx.model, 9);
  std::mt19937_64 rng(13);
  for (const Document &doc : fx.corpus.docs) {
    std::vector<int> perm(doc.num_entities());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Corpus c = fx.corpus;
    c.docs = {doc, testing::PermuteEntities(doc, perm)};
    EncoderConfig ec;
    ec.dim = 16;
    auto enc = EncodeCorpus(c, ec);
    auto in = MakeInputs(c, enc);
    auto base = PredictDocument(params, in[0]);
    auto moved = PredictDocument(params, in[1]);
    PairGraph graph = BuildPairGraph(doc.num_entities());
    for (const PairLogits &pl : base) {
      const PairLogits &other = moved[graph.NodeIndex(perm[pl.head], perm[pl.tail])];
      CHECK((pl.logits - other.logits).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

}  // namespace
}  // namespace pairre
