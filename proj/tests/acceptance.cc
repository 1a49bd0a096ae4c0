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

// Acceptance run: prints one PASS or FAIL line per criterion and exits
// nonzero if any gated criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "metric_oracles.h"
#include "pairre/cgmi.h"
#include "pairre/classifier.h"
#include "pairre/corpus.h"
#include "pairre/encoder.h"
#include "pairre/metrics.h"
#include "pairre/model.h"
#include "pairre/pairgraph.h"
#include "pairre/pipeline.h"
#include "pairre/training.h"
#include "test_util.h"

namespace pairre {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

int g_failures = 0;

void Report(bool pass, const std::string &name, const std::string &detail, bool gated = true) {
  std::printf("%s %s: %s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              gated ? "" : " [reported, not gated]");
  std::fflush(stdout);
  if (!pass && gated) ++g_failures;
}

std::string Format(const char *fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// ---------------------------------------------------------------------------

void GradientCorrectness() {
  auto start = Clock::now();
  GradCheckReport report = GradCheck(GradCheckConfig::Tiny());
  const double secs = Seconds(start);
  Report(report.max_rel_err <= 1e-4 && report.nonfinite.empty() &&
             report.num_checked == report.num_params && secs < 60.0,
         "gradient_correctness",
         Format("max_rel_err=%.3e (worst %s) over %ld/%ld params, %.2f s", report.max_rel_err,
                report.worst_param.c_str(), static_cast<long>(report.num_checked),
                static_cast<long>(report.num_params), secs));
}

// ---------------------------------------------------------------------------

struct SimplexStats {
  long vectors = 0;
  double worst_sum = 0.0;
  double most_negative = 0.0;
  long outside = 0;  // nonzero weights on non-neighbors

  void Add(const VectorXd &w) {
    ++vectors;
    worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
    most_negative = std::min(most_negative, w.minCoeff());
  }
  bool ok() const { return worst_sum <= 1e-9 && most_negative >= 0.0 && outside == 0; }
};

void NormalizationInvariants() {
  std::mt19937_64 rng(2024);
  SimplexStats context, mention, gnn;
  for (int instance = 0; instance < 1000; ++instance) {
    SynthConfig sc;
    sc.num_docs = 1;
    sc.seed = 5000 + instance;
    sc.entities_per_doc = 2 + instance % 4;
    sc.mentions_per_entity = 1 + instance % 3;
    sc.sentences_per_doc = 1 + instance % 3;
    sc.trigger_length = 1 + instance % 2;
    sc.min_filler = 1;
    sc.max_filler = 3;
    Corpus corpus = SynthCorpus(sc);
    const int d = instance % 2 ? 8 : 16;
    EncoderConfig ec;
    ec.dim = d;
    ec.seed = instance;
    EncodedDocument enc = EncodeCorpus(corpus, ec)[0];
    AttentionParams attn;
    const double scale = 0.5 + (instance % 5);
    attn.query = testing::RandomMatrix(d, d, rng, scale);
    attn.key = testing::RandomMatrix(d, d, rng, scale);
    const int m = corpus.docs[0].num_entities();
    PairGraph graph = BuildPairGraph(m);
    for (const auto &[h, t] : graph.nodes) {
      PairEntityEmbedding pe = PairEntities(enc, h, t, attn);
      context.Add(pe.context.a);
      mention.Add(pe.head_weights);
      mention.Add(pe.tail_weights);
    }
    const int dn = 6;
    GnnLayerParams layer;
    layer.w_msg = testing::RandomMatrix(dn, dn, rng);
    layer.query = testing::RandomMatrix(dn, dn, rng, scale);
    layer.key = testing::RandomMatrix(dn, dn, rng, scale);
    layer.ffn_in = testing::RandomMatrix(dn, dn, rng);
    layer.ffn_in_bias = testing::RandomMatrix(dn, 1, rng);
    layer.ffn_out = testing::RandomMatrix(dn, dn, rng);
    layer.ffn_out_bias = testing::RandomMatrix(dn, 1, rng);
    layer.norm_scale = MatrixXd::Ones(dn, 1);
    layer.norm_shift = MatrixXd::Zero(dn, 1);
    GnnLayerResult res = GnnLayer(testing::RandomMatrix(dn, graph.size(), rng, 3.0), graph, layer);
    for (int u = 0; u < graph.size(); ++u) {
      VectorXd row(graph.adjacency[u].size());
      for (size_t i = 0; i < graph.adjacency[u].size(); ++i) {
        row[i] = res.attention(graph.adjacency[u][i], u);
      }
      gnn.Add(row);
      for (int v = 0; v < graph.size(); ++v) {
        const bool neighbor =
            std::binary_search(graph.adjacency[u].begin(), graph.adjacency[u].end(), v);
        if (!neighbor && res.attention(v, u) != 0.0) ++gnn.outside;
      }
    }
  }
  Report(context.ok() && mention.ok() && gnn.ok(), "normalization_invariants",
         Format("1000 instances; pair context %ld vectors max|sum-1|=%.1e min=%.1e; "
                "mention weights %ld max|sum-1|=%.1e min=%.1e; gnn rows %ld max|sum-1|=%.1e "
                "min=%.1e, %ld non-neighbor weights",
                context.vectors, context.worst_sum, context.most_negative, mention.vectors,
                mention.worst_sum, mention.most_negative, gnn.vectors, gnn.worst_sum,
                gnn.most_negative, gnn.outside));
}

// ---------------------------------------------------------------------------

void GraphOracle() {
  long checked = 0, mismatches = 0;
  bool degree_ok = true;
  for (int m = 2; m <= 8; ++m) {
    PairGraph graph = BuildPairGraph(m);
    std::vector<std::pair<int, int>> expected_nodes;
    for (int h = 0; h < m; ++h) {
      for (int t = 0; t < m; ++t) {
        if (h != t) expected_nodes.push_back({h, t});
      }
    }
    if (graph.nodes != expected_nodes) ++mismatches;
    for (int u = 0; u < graph.size(); ++u) {
      for (int v = 0; v < graph.size(); ++v) {
        const auto [a, b] = graph.nodes[u];
        const auto [c, e] = graph.nodes[v];
        const bool shared = u != v && (a == c || a == e || b == c || b == e);
        const bool linked =
            std::binary_search(graph.adjacency[u].begin(), graph.adjacency[u].end(), v);
        mismatches += shared != linked;
        ++checked;
      }
      if (m == 4 && graph.adjacency[u].size() != 9) degree_ok = false;
    }
  }
  Report(mismatches == 0 && degree_ok, "graph_oracle",
         Format("%ld node pairs over m=2..8, %ld mismatches, m=4 degree 9 everywhere: %s",
                checked, mismatches, degree_ok ? "yes" : "no"));
}

// ---------------------------------------------------------------------------

void LossIdentities() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int r = 1 + i % 8;
    VectorXd logits = testing::RandomMatrix(r + 1, 1, rng, 4.0).col(0);
    std::vector<int> gold;
    for (int k = 0; k < r; ++k) {
      if (rng() % 3 == 0) gold.push_back(k);
    }
    VectorXd moved = logits.array() + shift(rng);
    worst = std::max(worst, std::abs(AtlLoss(moved, gold) - AtlLoss(logits, gold)));
  }
  const double equal = std::abs(AtlLoss(VectorXd::Constant(4, 0.7), {}) - std::log(4.0));
  Report(worst <= 1e-9 && equal <= 1e-9, "loss_identities",
         Format("max shift deviation %.2e over 1000 vectors; |loss - log 4| = %.2e", worst,
                equal));
}

// ---------------------------------------------------------------------------

struct Split {
  Corpus corpus;
  std::vector<EncodedDocument> encodings;
  std::vector<ModelInput> inputs;

  Split(const SynthConfig &sc, int dim) : corpus(SynthCorpus(sc)) {
    EncoderConfig ec;
    ec.dim = dim;
    encodings = EncodeCorpus(corpus, ec);
    inputs = MakeInputs(corpus, encodings);
  }
};

double CorpusF1(const ModelParams &params, const Split &split) {
  return MicroF1(ToTripletSet(PredictCorpus(params, split.inputs)), GoldTriplets(split.corpus)).f1;
}

TrainConfig HeadConfig(const Corpus &corpus, int dim, int epochs, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.model.dim = dim;
  cfg.model.groups = 8;
  cfg.model.gnn_layers = 1;
  cfg.model.num_relations = corpus.num_relations;
  cfg.model.num_types = corpus.num_types;
  cfg.lr_head = 3e-3;
  cfg.adamw.weight_decay = 0.01;
  cfg.epochs = epochs;
  cfg.batch_size = 4;
  cfg.seed = seed;
  return cfg;
}

ModelParams Learnability() {
  SynthConfig train_cfg;  // 64 docs, 4 entities, 4 relations, seed 7
  SynthConfig dev_cfg = train_cfg;
  dev_cfg.num_docs = 16;
  dev_cfg.seed = 8;
  Split train(train_cfg, 64), dev(dev_cfg, 64);
  TrainConfig cfg = HeadConfig(train.corpus, 64, 200, 7);
  auto start = Clock::now();
  TrainResult result = Train(train.inputs, cfg);
  const double secs = Seconds(start);
  const double train_f1 = CorpusF1(result.params, train);
  const double dev_f1 = CorpusF1(result.params, dev);
  int first = -1;
  for (const EpochReport &e : result.epochs) {
    if (first < 0 && e.train_f1 >= 0.95) first = e.epoch;
  }
  Report(!result.diverged && train_f1 >= 0.95 && dev_f1 >= 0.80 && secs < 300.0,
         "learnability",
         Format("train F1 %.4f (first >= 0.95 at epoch %d of 200), held-out 16-doc F1 %.4f, "
                "%.1f s on %d thread",
                train_f1, first, dev_f1, secs, cfg.jobs));
  return result.params;
}

// ---------------------------------------------------------------------------

void MetricOracles() {
  std::mt19937_64 rng(99);
  int mismatches = 0;
  long triplets = 0, chains = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + trial % 3, r = 2 + trial % 2, docs = 2 + trial % 3;
    auto make_corpus = [&](const std::string &prefix, int count) {
      Corpus c;
      c.num_relations = r;
      c.num_types = 1;
      std::uniform_int_distribution<int> sent(0, 2), name(0, 4);
      for (int i = 0; i < count; ++i) {
        std::vector<std::vector<testing::MentionSpec>> ents;
        for (int e = 0; e < m; ++e) {
          ents.push_back({{sent(rng), e, e + 1}, {sent(rng), m + e, m + e + 1}});
        }
        Document doc = testing::MakeDocument(prefix + std::to_string(i), {12, 12, 12}, ents);
        for (Entity &e : doc.entities) e.names = {"n" + std::to_string(name(rng))};
        c.docs.push_back(doc);
      }
      return c;
    };
    Corpus eval = make_corpus("e", docs), train = make_corpus("t", 3);
    auto random_set = [&](const Corpus &c, double density) {
      TripletSet s;
      std::bernoulli_distribution keep(density);
      for (const Document &doc : c.docs) {
        for (int h = 0; h < m; ++h) {
          for (int t = 0; t < m; ++t) {
            for (int k = 0; k < r && h != t; ++k) {
              if (keep(rng)) s.insert({doc.doc_id, h, t, k});
            }
          }
        }
      }
      return s;
    };
    for (const Triplet &t : random_set(train, 0.15)) {
      train.docs[std::stoi(t.doc_id.substr(1))].gold_facts.insert({t.head, t.tail, t.relation});
    }
    TripletSet gold = random_set(eval, 0.2);
    for (const Triplet &t : gold) {
      eval.docs[std::stoi(t.doc_id.substr(1))].gold_facts.insert({t.head, t.tail, t.relation});
    }
    TripletSet pred = random_set(eval, 0.2);
    for (const Triplet &t : gold) {
      if (rng() % 2) pred.insert(t);
    }
    triplets += pred.size() + gold.size();

    std::map<std::string, const Document *> by_id;
    for (const Document &doc : eval.docs) by_id[doc.doc_id] = &doc;
    CorpusIndex index(eval);
    MetricsReport got = ComputeMetrics(pred, eval, TrainFacts(train));

    using testing::OracleF1;
    using testing::OracleFilter;
    using testing::SameCounts;
    mismatches += !SameCounts(got.micro, OracleF1(pred, gold));
    auto unseen = [&](const Triplet &t) {
      return !testing::OracleSeenInTraining(t, *by_id.at(t.doc_id), train);
    };
    mismatches += !SameCounts(got.ign, OracleF1(OracleFilter(pred, unseen),
                                                OracleFilter(gold, unseen)));
    auto intra = [&](const Triplet &t) { return testing::OracleIntra(t, by_id); };
    auto inter = [&](const Triplet &t) { return !testing::OracleIntra(t, by_id); };
    mismatches += !SameCounts(got.intra_inter.intra,
                              OracleF1(OracleFilter(pred, intra), OracleFilter(gold, intra)));
    mismatches += !SameCounts(got.intra_inter.inter,
                              OracleF1(OracleFilter(pred, inter), OracleFilter(gold, inter)));
    for (bool closing : {false, true}) {
      TripletSet gold_chain = testing::OracleChains(gold, m, r, closing);
      chains += gold_chain.size();
      InferF1 infer = InferScores(pred, gold, closing ? InferScope::kR3 : InferScope::kAll);
      mismatches += infer.has_instances != !gold_chain.empty();
      if (!gold_chain.empty()) {
        mismatches += !SameCounts(infer.score,
                                  OracleF1(testing::OracleChains(pred, m, r, closing), gold_chain));
      }
    }
  }
  Report(mismatches == 0, "metric_oracles",
         Format("200 random prediction/gold pairs (%ld triplets, %ld chain facts), "
                "%d mismatches across micro/ign/intra/inter/infer",
                triplets, chains, mismatches));
}

// ---------------------------------------------------------------------------

void Equivariance(const ModelParams &params) {
  SynthConfig sc;
  sc.num_docs = 50;
  sc.seed = 9;
  Corpus base = SynthCorpus(sc);
  std::mt19937_64 rng(31);
  Corpus moved = base;
  std::vector<std::vector<int>> perms;
  for (size_t i = 0; i < base.docs.size(); ++i) {
    std::vector<int> perm(base.docs[i].num_entities());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    moved.docs[i] = testing::PermuteEntities(base.docs[i], perm);
    perms.push_back(perm);
  }
  EncoderConfig ec;
  ec.dim = params.config().dim;
  auto base_enc = EncodeCorpus(base, ec), moved_enc = EncodeCorpus(moved, ec);
  auto base_pred = PredictCorpus(params, MakeInputs(base, base_enc));
  auto moved_pred = PredictCorpus(params, MakeInputs(moved, moved_enc));
  TripletSet relabeled;
  std::map<std::string, size_t> doc_index;
  for (size_t i = 0; i < base.docs.size(); ++i) doc_index[base.docs[i].doc_id] = i;
  for (const ScoredTriplet &p : base_pred) {
    const auto &perm = perms[doc_index.at(p.triplet.doc_id)];
    relabeled.insert({p.triplet.doc_id, perm[p.triplet.head], perm[p.triplet.tail],
                      p.triplet.relation});
  }
  const bool same = relabeled == ToTripletSet(moved_pred);
  Report(same && !relabeled.empty(), "equivariance",
         Format("50 documents, %zu positive decisions, prediction sets equal after relabeling: %s",
                relabeled.size(), same ? "yes" : "no"));
}

// ---------------------------------------------------------------------------

void DeterminismAndRoundTrips() {
  SynthConfig sc;
  sc.num_docs = 8;
  Split split(sc, 16);
  TrainConfig cfg = HeadConfig(split.corpus, 16, 4, 3);
  TrainResult a = Train(split.inputs, cfg);
  TrainResult b = Train(split.inputs, cfg);
  bool curves = a.curve.size() == b.curve.size() && !a.curve.empty();
  for (size_t i = 0; curves && i < a.curve.size(); ++i) {
    curves = a.curve[i].loss == b.curve[i].loss && a.curve[i].lr == b.curve[i].lr;
  }
  curves = curves && a.params.Flatten() == b.params.Flatten();

  const std::string ckpt = testing::TempPath("acceptance.ckpt").string();
  SaveCheckpoint(ckpt, a.params, &a.optimizer);
  Checkpoint loaded = LoadCheckpoint(ckpt);
  const bool checkpoint = loaded.params.Flatten() == a.params.Flatten() && loaded.optimizer &&
                          loaded.optimizer->first_moment == a.optimizer.first_moment &&
                          loaded.optimizer->second_moment == a.optimizer.second_moment;

  bool encoding = true, single_window = true;
  for (size_t i = 0; i < split.corpus.docs.size(); ++i) {
    const EncodedDocument &enc = split.encodings[i];
    const std::string path = testing::TempPath("acceptance.enc").string();
    SaveEncoding(enc, path);
    MarkedDocument marked = InsertMarkers(split.corpus.docs[i]);
    EncodedDocument back = LoadEncoding(path, &marked, 16);
    encoding = encoding && back.H.size() == enc.H.size() && back.A.size() == enc.A.size() &&
               std::memcmp(back.H.data(), enc.H.data(), enc.H.size() * sizeof(double)) == 0 &&
               std::memcmp(back.A.data(), enc.A.data(), enc.A.size() * sizeof(double)) == 0 &&
               back.mention_starts == enc.mention_starts;
    const int n = static_cast<int>(marked.tokens.size());
    EncodedDocument whole = MockEncode(marked, 16, 7);
    EncodedDocument windowed = EncodeWindows(marked, n, 4, 16, 7);
    single_window = single_window && whole.H == windowed.H && whole.A == windowed.A;
  }
  Report(curves && checkpoint && encoding && single_window, "determinism_round_trips",
         Format("identical loss curves: %s; checkpoint bit-exact: %s; encodings bit-exact: %s; "
                "single-window equals whole-document: %s",
                curves ? "yes" : "no", checkpoint ? "yes" : "no", encoding ? "yes" : "no",
                single_window ? "yes" : "no"));
}

// ---------------------------------------------------------------------------

void Ablation() {
  SynthConfig sc;
  sc.mentions_per_entity = 2;
  sc.trigger_length = 3;
  SynthConfig dev_cfg = sc;
  dev_cfg.num_docs = 16;
  dev_cfg.seed = 8;
  Split train(sc, 64), dev(dev_cfg, 64);
  const std::vector<std::uint64_t> seeds = {7, 11, 13};
  double full = 0.0, mean_pool = 0.0, no_gnn = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : seeds) {
    TrainConfig cfg = HeadConfig(train.corpus, 64, 100, seed);
    const double f = CorpusF1(Train(train.inputs, cfg).params, dev);
    cfg.model.mention_integration = false;
    const double p = CorpusF1(Train(train.inputs, cfg).params, dev);
    cfg.model.mention_integration = true;
    cfg.model.gnn_layers = 0;
    const double g = CorpusF1(Train(train.inputs, cfg).params, dev);
    full += f / seeds.size();
    mean_pool += p / seeds.size();
    no_gnn += g / seeds.size();
    per_seed += Format(" seed %lu: %.3f/%.3f/%.3f;", static_cast<unsigned long>(seed), f, p, g);
  }
  Report(mean_pool < full && no_gnn < full, "ablation_direction",
         Format("two-mention held-out F1 (mean of 3 seeds) full %.4f, mean pooling %.4f, "
                "no GNN %.4f;%s",
                full, mean_pool, no_gnn, per_seed.c_str()),
         /*gated=*/false);
}

}  // namespace
}  // namespace pairre

int main() {
  using namespace pairre;
  GradientCorrectness();
  NormalizationInvariants();
  GraphOracle();
  LossIdentities();
  ModelParams learned = Learnability();
  MetricOracles();
  Equivariance(learned);
  DeterminismAndRoundTrips();
  Ablation();
  std::printf("%s: %d gated criteria failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
