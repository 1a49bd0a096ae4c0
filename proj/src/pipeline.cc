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

#include "pairre/pipeline.h"

#include <cstdio>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "pairre/error.h"

namespace pairre {

using nlohmann::json;

void to_json(json &j, const EncoderConfig &cfg) {
  j = {{"dim", cfg.dim}, {"window", cfg.window}, {"overlap", cfg.overlap}, {"seed", cfg.seed}};
}

void from_json(const json &j, EncoderConfig &cfg) {
  cfg.dim = j.value("dim", cfg.dim);
  cfg.window = j.value("window", cfg.window);
  cfg.overlap = j.value("overlap", cfg.overlap);
  cfg.seed = j.value("seed", cfg.seed);
}

void ParallelFor(int n, int jobs, const std::function<void(int)> &fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      for (int i = w; i < n; i += jobs) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto &t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<EncodedDocument> EncodeCorpus(const Corpus &corpus, const EncoderConfig &cfg) {
  std::vector<EncodedDocument> out;
  out.reserve(corpus.docs.size());
  for (const Document &doc : corpus.docs) {
    MarkedDocument marked = InsertMarkers(doc);
    out.push_back(EncodeWindows(marked, cfg.window, cfg.overlap, cfg.dim, cfg.seed));
  }
  return out;
}

std::vector<ModelInput> MakeInputs(const Corpus &corpus,
                                   const std::vector<EncodedDocument> &encodings) {
  if (encodings.size() != corpus.docs.size()) {
    throw DimensionError("have " + std::to_string(encodings.size()) + " encodings for " +
                         std::to_string(corpus.docs.size()) + " documents");
  }
  std::vector<ModelInput> inputs;
  for (size_t i = 0; i < encodings.size(); ++i) inputs.push_back({&corpus.docs[i], &encodings[i]});
  return inputs;
}

std::vector<ScoredTriplet> PredictCorpus(const ModelParams &params,
                                         const std::vector<ModelInput> &inputs, int jobs) {
  std::vector<std::vector<ScoredTriplet>> per_doc(inputs.size());
  ParallelFor(static_cast<int>(inputs.size()), jobs, [&](int i) {
    for (const PairLogits &pl : PredictDocument(params, inputs[i])) {
      Eigen::VectorXd probs = RelationProbabilities(pl.logits);
      for (int r : PredictRelations(pl.logits)) {
        per_doc[i].push_back({{inputs[i].doc->doc_id, pl.head, pl.tail, r}, probs[r]});
      }
    }
  });
  std::vector<ScoredTriplet> out;
  for (auto &v : per_doc) out.insert(out.end(), v.begin(), v.end());
  return out;
}

TripletSet ToTripletSet(const std::vector<ScoredTriplet> &predictions) {
  TripletSet set;
  for (const auto &p : predictions) set.insert(p.triplet);
  return set;
}

void WritePredictions(const std::vector<ScoredTriplet> &predictions, std::ostream &out) {
  out << kPredictionHeader << '\n';
  char score[32];
  for (const auto &p : predictions) {
    std::snprintf(score, sizeof(score), "%.17g", p.score);
    out << p.triplet.doc_id << '\t' << p.triplet.head << '\t' << p.triplet.tail << '\t'
        << p.triplet.relation << '\t' << score << '\n';
  }
}

std::vector<ScoredTriplet> ReadPredictions(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) || line != kPredictionHeader) {
    throw ParseError("not a prediction dump (missing header)");
  }
  std::vector<ScoredTriplet> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    ScoredTriplet p;
    if (!std::getline(fields, p.triplet.doc_id, '\t') ||
        !(fields >> p.triplet.head >> p.triplet.tail >> p.triplet.relation >> p.score)) {
      throw ParseError("malformed prediction line " + std::to_string(lineno));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace pairre
