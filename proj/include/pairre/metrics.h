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

#ifndef PAIRRE_METRICS_H_
#define PAIRRE_METRICS_H_

#include <compare>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "pairre/corpus.h"

namespace pairre {

// One relational fact of one document. Relation ids never include a
// "no relation" class.
struct Triplet {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  int relation = 0;

  friend auto operator<=>(const Triplet &, const Triplet &) = default;
};

using TripletSet = std::set<Triplet>;

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t num_pred = 0;
  size_t num_gold = 0;
  size_t num_correct = 0;
};

// Precision is 1 for an empty prediction against empty gold and 0 against
// non-empty gold; recall is 1 for empty gold. F1 is 0 when P + R = 0.
F1Score MicroF1(const TripletSet &pred, const TripletSet &gold);

// Looks up documents by id.
class CorpusIndex {
 public:
  explicit CorpusIndex(const Corpus &corpus);
  // Throws Error for unknown ids.
  const Document &Get(const std::string &doc_id) const;

 private:
  std::map<std::string, const Document *> docs_;
};

// Fact identity across documents: sorted head names, sorted tail names,
// relation.
using FactKey = std::tuple<std::vector<std::string>, std::vector<std::string>, int>;

FactKey KeyOf(const Triplet &t, const CorpusIndex &index);
std::set<FactKey> TrainFacts(const Corpus &train);

// Micro F1 after dropping every triplet whose fact key is in `train_facts`
// from both prediction and gold.
F1Score IgnF1(const TripletSet &pred, const TripletSet &gold,
              const std::set<FactKey> &train_facts, const CorpusIndex &index);

// A triplet is intra-sentential iff some head mention and some tail
// mention share a sentence.
bool IsIntraSentence(const Triplet &t, const CorpusIndex &index);

struct IntraInterF1 {
  F1Score intra;
  F1Score inter;
};

IntraInterF1 IntraInterScores(const TripletSet &pred, const TripletSet &gold,
                              const CorpusIndex &index);

enum class InferScope {
  kAll,  // r1, r2 and r3 of every chain
  kR3,   // only the closing fact h -> t
};

InferScope ParseInferScope(const std::string &name);

// Facts that take part in a two-hop chain (h,r1,o), (o,r2,t) closed by
// (h,r3,t) inside one document, with h, o, t distinct.
TripletSet ChainRestriction(const TripletSet &facts, InferScope scope = InferScope::kAll);

struct InferF1 {
  F1Score score;
  // False when the gold set has no chain; the score is then all zeros.
  bool has_instances = false;
};

// Micro F1 of the chain-restricted prediction against the chain-restricted
// gold.
InferF1 InferScores(const TripletSet &pred, const TripletSet &gold,
                    InferScope scope = InferScope::kAll);

// Gold triplets of a corpus.
TripletSet GoldTriplets(const Corpus &corpus);

struct MetricsReport {
  F1Score micro;
  F1Score ign;
  IntraInterF1 intra_inter;
  InferF1 infer;
};

MetricsReport ComputeMetrics(const TripletSet &pred, const Corpus &eval,
                             const std::set<FactKey> &train_facts,
                             InferScope scope = InferScope::kAll);

nlohmann::json ToJson(const F1Score &score);
// {f1, ign_f1, intra_f1, inter_f1, infer_f1, precision, recall, counts}
nlohmann::json ToJson(const MetricsReport &report);

}  // namespace pairre

#endif  // PAIRRE_METRICS_H_
