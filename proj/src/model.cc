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

#include "pairre/model.h"

#include <random>

#include "pairre/bind.h"
#include "pairre/error.h"

namespace pairre {

using nlohmann::json;

void ModelConfig::Validate() const {
  if (dim <= 0) throw ConfigError("dim must be positive");
  if (groups <= 0 || dim % groups != 0) {
    throw ConfigError("dim " + std::to_string(dim) + " is not divisible by " +
                      std::to_string(groups) + " groups");
  }
  if (gnn_layers < 0) throw ConfigError("gnn_layers must be >= 0");
  if (coref_width() < 0) throw ConfigError("coref_dim must be >= 0");
  if (num_relations <= 0) throw ConfigError("num_relations must be positive");
  if (num_types <= 0) throw ConfigError("num_types must be positive");
}

void to_json(json &j, const ModelConfig &cfg) {
  j = {{"dim", cfg.dim},
       {"groups", cfg.groups},
       {"gnn_layers", cfg.gnn_layers},
       {"coref_dim", cfg.coref_width()},
       {"num_relations", cfg.num_relations},
       {"num_types", cfg.num_types},
       {"bilinear", ToString(cfg.bilinear)},
       {"gnn_summand", ToString(cfg.summand)},
       {"mention_integration", cfg.mention_integration}};
}

void from_json(const json &j, ModelConfig &cfg) {
  cfg.dim = j.value("dim", cfg.dim);
  cfg.groups = j.value("groups", cfg.groups);
  cfg.gnn_layers = j.value("gnn_layers", cfg.gnn_layers);
  cfg.coref_dim = j.value("coref_dim", cfg.coref_dim);
  cfg.num_relations = j.value("num_relations", cfg.num_relations);
  cfg.num_types = j.value("num_types", cfg.num_types);
  if (j.contains("bilinear")) cfg.bilinear = ParseBilinearMode(j.at("bilinear").get<std::string>());
  if (j.contains("gnn_summand")) cfg.summand = ParseGnnSummand(j.at("gnn_summand").get<std::string>());
  cfg.mention_integration = j.value("mention_integration", cfg.mention_integration);
}

ModelParams::ModelParams(const ModelConfig &config) : config_(config) {
  config.Validate();
  const int d = config.dim, g = d / config.groups, dn = config.node_dim();
  using Eigen::MatrixXd;
  attention.query = MatrixXd::Zero(d, d);
  attention.key = MatrixXd::Zero(d, d);
  pair.w_head = pair.w_tail = pair.w_ctx_head = pair.w_ctx_tail = MatrixXd::Zero(d, d);
  pair.w_group.assign(config.groups, MatrixXd::Zero(g, g));
  pair.coref = MatrixXd::Zero(config.coref_width(), config.num_types);
  GnnLayerParams layer;
  layer.w_msg = layer.query = layer.key = layer.ffn_in = layer.ffn_out = MatrixXd::Zero(dn, dn);
  layer.ffn_in_bias = layer.ffn_out_bias = layer.norm_shift = MatrixXd::Zero(dn, 1);
  layer.norm_scale = MatrixXd::Ones(dn, 1);
  gnn.assign(config.gnn_layers, layer);
  classifier.w_hidden = MatrixXd::Zero(2 * d + dn, d);
  classifier.b_hidden = MatrixXd::Zero(d, 1);
  classifier.w_out = MatrixXd::Zero(d, config.num_outputs());
  classifier.b_out = MatrixXd::Zero(config.num_outputs(), 1);
}

ModelParams ModelParams::Zeros(const ModelConfig &config) { return ModelParams(config); }

namespace {

// Orthonormal columns (or rows, for wide shapes) from the QR factor of a
// Gaussian matrix, with the sign convention that makes the result
// uniformly distributed.
Eigen::MatrixXd RandomOrthogonal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng) {
  if (rows == 0 || cols == 0) return Eigen::MatrixXd::Zero(rows, cols);
  const Eigen::Index tall = std::max(rows, cols), narrow = std::min(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd gauss(tall, narrow);
  for (Eigen::Index c = 0; c < narrow; ++c) {
    for (Eigen::Index r = 0; r < tall; ++r) gauss(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, narrow);
  for (Eigen::Index j = 0; j < narrow; ++j) {
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  }
  if (rows >= cols) return q;
  return q.transpose();
}

}  // namespace

ModelParams ModelParams::Initialize(const ModelConfig &config, std::uint64_t seed) {
  ModelParams params(config);
  std::mt19937_64 rng(seed);
  VisitFields(static_cast<ModelWeights<Eigen::MatrixXd> &>(params),
              [&](const std::string &, Eigen::MatrixXd &m) {
                if (m.cols() == 1) return;  // biases and layer-norm vectors keep their defaults
                m = RandomOrthogonal(m.rows(), m.cols(), rng);
              });
  return params;
}

std::vector<ParamSlot> ModelParams::Layout() const {
  std::vector<ParamSlot> slots;
  Eigen::Index offset = 0;
  VisitFields(static_cast<const ModelWeights<Eigen::MatrixXd> &>(*this),
              [&](const std::string &name, const Eigen::MatrixXd &m) {
                slots.push_back({name, offset, m.rows(), m.cols()});
                offset += m.size();
              });
  return slots;
}

Eigen::Index ModelParams::NumParams() const {
  Eigen::Index n = 0;
  VisitFields(static_cast<const ModelWeights<Eigen::MatrixXd> &>(*this),
              [&](const std::string &, const Eigen::MatrixXd &m) { n += m.size(); });
  return n;
}

Eigen::VectorXd ModelParams::Flatten() const {
  Eigen::VectorXd flat(NumParams());
  Eigen::Index offset = 0;
  VisitFields(static_cast<const ModelWeights<Eigen::MatrixXd> &>(*this),
              [&](const std::string &, const Eigen::MatrixXd &m) {
                flat.segment(offset, m.size()) = m.reshaped();
                offset += m.size();
              });
  return flat;
}

void ModelParams::Unflatten(const Eigen::VectorXd &flat) {
  if (flat.size() != NumParams()) {
    throw DimensionError("flat vector has " + std::to_string(flat.size()) +
                         " entries, model has " + std::to_string(NumParams()));
  }
  Eigen::Index offset = 0;
  VisitFields(static_cast<ModelWeights<Eigen::MatrixXd> &>(*this),
              [&](const std::string &, Eigen::MatrixXd &m) {
                m.reshaped() = flat.segment(offset, m.size());
                offset += m.size();
              });
}

std::string ModelParams::NameOf(Eigen::Index index) const {
  for (const ParamSlot &slot : Layout()) {
    if (index >= slot.offset && index < slot.offset + slot.rows * slot.cols) {
      Eigen::Index local = index - slot.offset;
      return slot.name + "[" + std::to_string(local % slot.rows) + "," +
             std::to_string(local / slot.rows) + "]";
    }
  }
  throw Error("parameter index " + std::to_string(index) + " out of range");
}

std::vector<std::vector<int>> GoldPerPair(const Document &doc, const PairGraph &graph) {
  std::vector<std::vector<int>> gold(graph.size());
  for (const RelationFact &f : doc.gold_facts) {
    gold[graph.NodeIndex(f.head, f.tail)].push_back(f.relation);
  }
  return gold;
}

ForwardResult Forward(ad::Tape &tape, const ModelVars &vars, const ModelConfig &config,
                      const ModelInput &input, bool with_loss) {
  const Document &doc = *input.doc;
  const EncodedDocument &enc = *input.enc;
  if (enc.dim() != config.dim) {
    throw DimensionError("document '" + doc.doc_id + "' is encoded with dimension " +
                         std::to_string(enc.dim()) + ", model expects " +
                         std::to_string(config.dim));
  }
  if (static_cast<int>(enc.mention_starts.size()) != doc.num_entities()) {
    throw DimensionError("encoding of '" + doc.doc_id + "' does not match its entities");
  }
  ForwardResult out;
  try {
    out.graph = BuildPairGraph(doc.num_entities());
    const int n = out.graph.size();

    std::vector<ad::Var> mention_rows;
    for (int e = 0; e < doc.num_entities(); ++e) {
      mention_rows.push_back(tape.Constant(MentionRows(enc, e)));
    }
    Eigen::MatrixXd contexts(config.dim, n);
    std::vector<ad::Var> heads, tails;
    std::vector<int> head_types, tail_types;
    for (int u = 0; u < n; ++u) {
      auto [h, t] = out.graph.nodes[u];
      PairContext ctx = ComputePairContext(enc, h, t);
      out.degenerate_contexts += ctx.degenerate;
      contexts.col(u) = ctx.c;
      head_types.push_back(doc.entities[h].entity_type);
      tail_types.push_back(doc.entities[t].entity_type);
      if (config.mention_integration) {
        ad::Var c = tape.Constant(ctx.c);
        ad::Var wh, wt;
        heads.push_back(IntegrateMentions(c, mention_rows[h], vars.attention.query,
                                          vars.attention.key, &wh));
        tails.push_back(IntegrateMentions(c, mention_rows[t], vars.attention.query,
                                          vars.attention.key, &wt));
        out.head_weights.push_back(wh.value().col(0));
        out.tail_weights.push_back(wt.value().col(0));
      } else {
        auto mean = [&](int e) {
          const Eigen::Index p = mention_rows[e].cols();
          Eigen::VectorXd w = Eigen::VectorXd::Constant(p, 1.0 / p);
          Eigen::VectorXd pooled = mention_rows[e].value() * w;
          return std::make_pair(pooled, w);
        };
        auto [eh, wh] = mean(h);
        auto [et, wt] = mean(t);
        heads.push_back(tape.Constant(eh));
        tails.push_back(tape.Constant(et));
        out.head_weights.push_back(wh);
        out.tail_weights.push_back(wt);
      }
    }
    out.heads = ad::ConcatCols(heads);
    out.tails = ad::ConcatCols(tails);
    ad::Var pair = PairEmbedding(out.heads, out.tails, tape.Constant(std::move(contexts)),
                                 vars.pair, config.bilinear);
    ad::Var nodes = InitNodes(pair, head_types, tail_types, vars.pair.coref);
    out.nodes = RunGnn(nodes, out.graph, vars.gnn, config.summand);
    out.logits = RelationLogits(out.heads, out.tails, out.nodes, vars.classifier);
    if (with_loss) out.loss = MeanAtlLoss(out.logits, GoldPerPair(doc, out.graph));
  } catch (const NonFiniteError &ex) {
    throw NonFiniteError("document '" + doc.doc_id + "': " + ex.what());
  }
  return out;
}

std::vector<PairLogits> PredictDocument(const ModelParams &params, const ModelInput &input) {
  std::vector<PairLogits> out;
  if (input.doc->num_entities() < 2) return out;
  ad::Tape tape;
  ModelVars vars = BindToTape(tape, static_cast<const ModelWeights<Eigen::MatrixXd> &>(params),
                              false);
  ForwardResult fwd = Forward(tape, vars, params.config(), input, false);
  for (int u = 0; u < fwd.graph.size(); ++u) {
    PairLogits pl;
    pl.logits = fwd.logits.value().col(u);
    pl.head = fwd.graph.nodes[u].first;
    pl.tail = fwd.graph.nodes[u].second;
    out.push_back(std::move(pl));
  }
  return out;
}

}  // namespace pairre
