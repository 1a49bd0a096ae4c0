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

#include "pairre/metrics.h"

#include <algorithm>

#include "pairre/error.h"

namespace pairre {

using nlohmann::json;

F1Score MicroF1(const TripletSet &pred, const TripletSet &gold) {
  F1Score s;
  s.num_pred = pred.size();
  s.num_gold = gold.size();
  for (const Triplet &t : pred) s.num_correct += gold.count(t);
  if (pred.empty()) {
    s.precision = gold.empty() ? 1.0 : 0.0;
  } else {
    s.precision = static_cast<double>(s.num_correct) / s.num_pred;
  }
  s.recall = gold.empty() ? 1.0 : static_cast<double>(s.num_correct) / s.num_gold;
  double denom = s.precision + s.recall;
  s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
  return s;
}

CorpusIndex::CorpusIndex(const Corpus &corpus) {
  for (const Document &doc : corpus.docs) docs_[doc.doc_id] = &doc;
}

const Document &CorpusIndex::Get(const std::string &doc_id) const {
  auto it = docs_.find(doc_id);
  if (it == docs_.end()) throw Error("triplet refers to unknown document '" + doc_id + "'");
  return *it->second;
}

namespace {

std::vector<std::string> SortedNames(const Entity &e) {
  std::vector<std::string> names = e.names;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace

FactKey KeyOf(const Triplet &t, const CorpusIndex &index) {
  const Document &doc = index.Get(t.doc_id);
  if (t.head < 0 || t.head >= doc.num_entities() || t.tail < 0 ||
      t.tail >= doc.num_entities()) {
    throw Error("triplet refers to a missing entity of '" + t.doc_id + "'");
  }
  return {SortedNames(doc.entities[t.head]), SortedNames(doc.entities[t.tail]), t.relation};
}

std::set<FactKey> TrainFacts(const Corpus &train) {
  std::set<FactKey> facts;
  for (const Document &doc : train.docs) {
    for (const RelationFact &f : doc.gold_facts) {
      facts.insert({SortedNames(doc.entities[f.head]), SortedNames(doc.entities[f.tail]),
                    f.relation});
    }
  }
  return facts;
}

F1Score IgnF1(const TripletSet &pred, const TripletSet &gold,
              const std::set<FactKey> &train_facts, const CorpusIndex &index) {
  auto keep = [&](const TripletSet &in) {
    TripletSet out;
    for (const Triplet &t : in) {
      if (!train_facts.count(KeyOf(t, index))) out.insert(t);
    }
    return out;
  };
  if (train_facts.empty()) return MicroF1(pred, gold);
  return MicroF1(keep(pred), keep(gold));
}

bool IsIntraSentence(const Triplet &t, const CorpusIndex &index) {
  const Document &doc = index.Get(t.doc_id);
  if (t.head < 0 || t.head >= doc.num_entities() || t.tail < 0 ||
      t.tail >= doc.num_entities()) {
    throw Error("triplet refers to a missing entity of '" + t.doc_id + "'");
  }
  for (const Mention &a : doc.entities[t.head].mentions) {
    for (const Mention &b : doc.entities[t.tail].mentions) {
      if (a.sent_index == b.sent_index) return true;
    }
  }
  return false;
}

IntraInterF1 IntraInterScores(const TripletSet &pred, const TripletSet &gold,
                              const CorpusIndex &index) {
  TripletSet pred_intra, pred_inter, gold_intra, gold_inter;
  for (const Triplet &t : pred) (IsIntraSentence(t, index) ? pred_intra : pred_inter).insert(t);
  for (const Triplet &t : gold) (IsIntraSentence(t, index) ? gold_intra : gold_inter).insert(t);
  return {MicroF1(pred_intra, gold_intra), MicroF1(pred_inter, gold_inter)};
}

InferScope ParseInferScope(const std::string &name) {
  if (name == "all") return InferScope::kAll;
  if (name == "r3") return InferScope::kR3;
  throw ConfigError("unknown infer-eval scope '" + name + "' (expected all|r3)");
}

TripletSet ChainRestriction(const TripletSet &facts, InferScope scope) {
  TripletSet out;
  // Facts are ordered by doc_id first, so each document is a contiguous run.
  auto begin = facts.begin();
  while (begin != facts.end()) {
    auto end = begin;
    while (end != facts.end() && end->doc_id == begin->doc_id) ++end;
    std::map<int, std::vector<const Triplet *>> by_head;
    std::map<std::pair<int, int>, std::vector<const Triplet *>> by_pair;
    for (auto it = begin; it != end; ++it) {
      by_head[it->head].push_back(&*it);
      by_pair[{it->head, it->tail}].push_back(&*it);
    }
    for (auto it = begin; it != end; ++it) {
      const Triplet &first = *it;  // h -r1-> o
      auto second_it = by_head.find(first.tail);
      if (second_it == by_head.end()) continue;
      for (const Triplet *second : second_it->second) {  // o -r2-> t
        if (second->tail == first.head) continue;
        auto closing = by_pair.find({first.head, second->tail});
        if (closing == by_pair.end()) continue;
        for (const Triplet *third : closing->second) {  // h -r3-> t
          if (scope == InferScope::kAll) {
            out.insert(first);
            out.insert(*second);
          }
          out.insert(*third);
        }
      }
    }
    begin = end;
  }
  return out;
}

InferF1 InferScores(const TripletSet &pred, const TripletSet &gold, InferScope scope) {
  InferF1 result;
  TripletSet gold_chain = ChainRestriction(gold, scope);
  result.has_instances = !gold_chain.empty();
  if (!result.has_instances) return result;
  result.score = MicroF1(ChainRestriction(pred, scope), gold_chain);
  return result;
}

TripletSet GoldTriplets(const Corpus &corpus) {
  TripletSet gold;
  for (const Document &doc : corpus.docs) {
    for (const RelationFact &f : doc.gold_facts) {
      gold.insert({doc.doc_id, f.head, f.tail, f.relation});
    }
  }
  return gold;
}

MetricsReport ComputeMetrics(const TripletSet &pred, const Corpus &eval,
                             const std::set<FactKey> &train_facts, InferScope scope) {
  CorpusIndex index(eval);
  TripletSet gold = GoldTriplets(eval);
  MetricsReport report;
  report.micro = MicroF1(pred, gold);
  report.ign = IgnF1(pred, gold, train_facts, index);
  report.intra_inter = IntraInterScores(pred, gold, index);
  report.infer = InferScores(pred, gold, scope);
  return report;
}

json ToJson(const F1Score &score) {
  return {{"precision", score.precision}, {"recall", score.recall}, {"f1", score.f1},
          {"pred", score.num_pred},       {"gold", score.num_gold}, {"correct", score.num_correct}};
}

json ToJson(const MetricsReport &report) {
  return {{"f1", report.micro.f1},
          {"precision", report.micro.precision},
          {"recall", report.micro.recall},
          {"ign_f1", report.ign.f1},
          {"intra_f1", report.intra_inter.intra.f1},
          {"inter_f1", report.intra_inter.inter.f1},
          {"infer_f1", report.infer.score.f1},
          {"infer_has_instances", report.infer.has_instances},
          {"counts",
           {{"micro", ToJson(report.micro)},
            {"ign", ToJson(report.ign)},
            {"intra", ToJson(report.intra_inter.intra)},
            {"inter", ToJson(report.intra_inter.inter)},
            {"infer", ToJson(report.infer.score)}}}};
}

}  // namespace pairre
