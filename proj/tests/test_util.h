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

#ifndef PAIRRE_TESTS_TEST_UTIL_H_
#define PAIRRE_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairre/corpus.h"

namespace pairre::testing {

inline Eigen::MatrixXd RandomMatrix(int rows, int cols, std::mt19937_64 &rng,
                                    double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

// Random row-stochastic matrix.
inline Eigen::MatrixXd RandomStochastic(int rows, int cols, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> uniform(0.05, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = uniform(rng);
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

// Central differences of a scalar function at `x`.
inline Eigen::MatrixXd NumericGradient(const std::function<double(const Eigen::MatrixXd &)> &f,
                                       const Eigen::MatrixXd &x, double step = 1e-5) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  Eigen::MatrixXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    double plus = f(probe);
    probe(i) = x(i) - step;
    double minus = f(probe);
    probe(i) = x(i);
    g(i) = (plus - minus) / (2.0 * step);
  }
  return g;
}

inline double MaxRelativeError(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b,
                               double floor = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    double denom = std::max({std::abs(a(i)), std::abs(b(i)), floor});
    worst = std::max(worst, std::abs(a(i) - b(i)) / denom);
  }
  return worst;
}

// A hand-built document: sentence lengths are given, each entity lists
// (sentence, begin, end) spans.
struct MentionSpec {
  int sent;
  int begin;
  int end;
};

inline Document MakeDocument(const std::string &doc_id, const std::vector<int> &sentence_lengths,
                             const std::vector<std::vector<MentionSpec>> &entities,
                             const std::vector<int> &types = {},
                             const std::set<RelationFact> &facts = {}) {
  Document doc;
  doc.doc_id = doc_id;
  int token = kFirstWordToken;
  for (int len : sentence_lengths) {
    std::vector<int> sent;
    for (int i = 0; i < len; ++i) sent.push_back(token++);
    doc.sentences.push_back(std::move(sent));
  }
  for (size_t e = 0; e < entities.size(); ++e) {
    Entity entity;
    entity.entity_id = static_cast<int>(e);
    entity.entity_type = types.empty() ? 0 : types[e];
    entity.names = {"E" + std::to_string(e)};
    for (const MentionSpec &m : entities[e]) {
      entity.mentions.push_back({m.sent, {m.begin, m.end}, static_cast<int>(e)});
    }
    doc.entities.push_back(std::move(entity));
  }
  doc.gold_facts = facts;
  return doc;
}

// Relabels entities so that old entity e becomes entity perm[e]; facts
// follow their entities.
inline Document PermuteEntities(const Document &doc, const std::vector<int> &perm) {
  Document out = doc;
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    Entity entity = doc.entities[e];
    entity.entity_id = perm[e];
    for (Mention &m : entity.mentions) m.entity_id = perm[e];
    out.entities[perm[e]] = std::move(entity);
  }
  out.gold_facts.clear();
  for (const RelationFact &f : doc.gold_facts) {
    out.gold_facts.insert({perm[f.head], perm[f.tail], f.relation});
  }
  return out;
}

inline std::filesystem::path TempPath(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / "pairre_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace pairre::testing

#endif  // PAIRRE_TESTS_TEST_UTIL_H_
