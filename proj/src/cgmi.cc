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

#include "pairre/cgmi.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pairre/error.h"

namespace pairre {

Eigen::VectorXd EntityAttention(const EncodedDocument &enc, int entity) {
  if (entity < 0 || entity >= static_cast<int>(enc.mention_starts.size()) ||
      enc.mention_starts[entity].empty()) {
    throw Error("entity " + std::to_string(entity) + " has no encoded mentions");
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(enc.size());
  for (int row : enc.mention_starts[entity]) {
    if (row < 0 || row >= enc.size()) {
      throw Error("mention row " + std::to_string(row) + " out of range");
    }
    sum += enc.A.row(row).transpose();
  }
  return sum / static_cast<double>(enc.mention_starts[entity].size());
}

PairContext ComputePairContext(const EncodedDocument &enc, int head, int tail) {
  if (head == tail) throw Error("pair context needs head != tail");
  PairContext ctx;
  Eigen::VectorXd product = EntityAttention(enc, head).cwiseProduct(EntityAttention(enc, tail));
  double total = product.sum();
  if (total > 0.0) {
    ctx.a = product / total;
  } else {
    ctx.degenerate = true;
    std::vector<int> rows = enc.mention_starts[head];
    rows.insert(rows.end(), enc.mention_starts[tail].begin(), enc.mention_starts[tail].end());
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    ctx.a = Eigen::VectorXd::Zero(enc.size());
    for (int row : rows) ctx.a[row] = 1.0 / rows.size();
  }
  ctx.c = enc.H.transpose() * ctx.a;
  return ctx;
}

Eigen::MatrixXd MentionRows(const EncodedDocument &enc, int entity) {
  const auto &rows = enc.mention_starts.at(entity);
  Eigen::MatrixXd out(enc.dim(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out.col(i) = enc.H.row(rows[i]).transpose();
  return out;
}

ad::Var IntegrateMentions(ad::Var context, ad::Var mentions, ad::Var query, ad::Var key,
                          ad::Var *weights) {
  if (mentions.cols() == 0) throw Error("cannot integrate an empty mention list");
  const double d = static_cast<double>(context.rows());
  ad::Var q = ad::MatMul(query, context);
  ad::Var k = ad::MatMul(key, mentions);
  ad::Var scores = ad::Scale(ad::MatMul(ad::Transpose(k), q), 1.0 / std::sqrt(d));
  ad::Var alpha = ad::SoftmaxColumns(scores);
  if (weights != nullptr) *weights = alpha;
  return ad::MatMul(mentions, alpha);
}

MentionIntegration IntegrateMentions(const Eigen::VectorXd &context,
                                     const Eigen::MatrixXd &mentions,
                                     const AttentionParams &params) {
  ad::Tape tape;
  ad::Var weights;
  ad::Var out = IntegrateMentions(tape.Constant(context), tape.Constant(mentions),
                                  tape.Constant(params.query), tape.Constant(params.key),
                                  &weights);
  return {out.value().col(0), weights.value().col(0)};
}

PairEntityEmbedding PairEntities(const EncodedDocument &enc, int head, int tail,
                                 const AttentionParams &params) {
  PairEntityEmbedding out;
  out.context = ComputePairContext(enc, head, tail);
  MentionIntegration h = IntegrateMentions(out.context.c, MentionRows(enc, head), params);
  MentionIntegration t = IntegrateMentions(out.context.c, MentionRows(enc, tail), params);
  out.head = std::move(h.embedding);
  out.head_weights = std::move(h.weights);
  out.tail = std::move(t.embedding);
  out.tail_weights = std::move(t.weights);
  return out;
}

}  // namespace pairre
