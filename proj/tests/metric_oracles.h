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

// Brute-force reference implementations of the evaluation metrics, written
// independently of the library's set arithmetic.

#ifndef PAIRRE_TESTS_METRIC_ORACLES_H_
#define PAIRRE_TESTS_METRIC_ORACLES_H_

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "pairre/corpus.h"
#include "pairre/metrics.h"

namespace pairre::testing {

// Counts matches with a pairwise scan.
inline F1Score OracleF1(const TripletSet &pred, const TripletSet &gold) {
  size_t correct = 0;
  for (const Triplet &p : pred) {
    for (const Triplet &g : gold) correct += p == g;
  }
  F1Score s;
  s.num_pred = pred.size();
  s.num_gold = gold.size();
  s.num_correct = correct;
  s.precision = pred.empty() ? (gold.empty() ? 1.0 : 0.0) : double(correct) / pred.size();
  s.recall = gold.empty() ? 1.0 : double(correct) / gold.size();
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0;
  return s;
}

inline TripletSet OracleFilter(const TripletSet &facts,
                               const std::function<bool(const Triplet &)> &keep) {
  TripletSet out;
  for (const Triplet &t : facts) {
    if (keep(t)) out.insert(t);
  }
  return out;
}

// Per-mention double loop over sentence indices.
inline bool OracleIntra(const Triplet &t, const std::map<std::string, const Document *> &docs) {
  const Document &doc = *docs.at(t.doc_id);
  for (const Mention &a : doc.entities[t.head].mentions) {
    for (const Mention &b : doc.entities[t.tail].mentions) {
      if (a.sent_index == b.sent_index) return true;
    }
  }
  return false;
}

// True when some training fact joins entities with the same name lists by
// the same relation.
inline bool OracleSeenInTraining(const Triplet &t, const Document &doc, const Corpus &train) {
  for (const Document &td : train.docs) {
    for (const RelationFact &f : td.gold_facts) {
      if (f.relation != t.relation) continue;
      std::set<std::string> th(td.entities[f.head].names.begin(), td.entities[f.head].names.end());
      std::set<std::string> tt(td.entities[f.tail].names.begin(), td.entities[f.tail].names.end());
      std::set<std::string> eh(doc.entities[t.head].names.begin(), doc.entities[t.head].names.end());
      std::set<std::string> et(doc.entities[t.tail].names.begin(), doc.entities[t.tail].names.end());
      if (th == eh && tt == et) return true;
    }
  }
  return false;
}

// Enumerates every entity triple and relation triple of every document.
inline TripletSet OracleChains(const TripletSet &facts, int entities, int relations,
                               bool only_closing) {
  std::set<std::string> docs;
  for (const Triplet &t : facts) docs.insert(t.doc_id);
  TripletSet out;
  for (const std::string &d : docs) {
    for (int h = 0; h < entities; ++h) {
      for (int o = 0; o < entities; ++o) {
        for (int t = 0; t < entities; ++t) {
          if (h == o || o == t || h == t) continue;
          for (int r1 = 0; r1 < relations; ++r1) {
            for (int r2 = 0; r2 < relations; ++r2) {
              for (int r3 = 0; r3 < relations; ++r3) {
                Triplet a{d, h, o, r1}, b{d, o, t, r2}, c{d, h, t, r3};
                if (facts.count(a) && facts.count(b) && facts.count(c)) {
                  if (!only_closing) {
                    out.insert(a);
                    out.insert(b);
                  }
                  out.insert(c);
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

// Counts must agree exactly; ratios may differ only by rounding.
inline bool SameCounts(const F1Score &a, const F1Score &b) {
  auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
  return a.num_pred == b.num_pred && a.num_gold == b.num_gold && a.num_correct == b.num_correct &&
         close(a.precision, b.precision) && close(a.recall, b.recall) && close(a.f1, b.f1);
}

}  // namespace pairre::testing

#endif  // PAIRRE_TESTS_METRIC_ORACLES_H_
