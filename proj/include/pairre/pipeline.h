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

#ifndef PAIRRE_PIPELINE_H_
#define PAIRRE_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pairre/corpus.h"
#include "pairre/encoder.h"
#include "pairre/metrics.h"
#include "pairre/model.h"

namespace pairre {

struct EncoderConfig {
  int dim = 32;
  int window = kDefaultWindowWidth;
  int overlap = kDefaultWindowOverlap;
  std::uint64_t seed = 7;
};

void to_json(nlohmann::json &j, const EncoderConfig &cfg);
void from_json(const nlohmann::json &j, EncoderConfig &cfg);

// Marks and mock-encodes every document (windowed when longer than the
// window width).
std::vector<EncodedDocument> EncodeCorpus(const Corpus &corpus, const EncoderConfig &cfg);

// Pairs documents with their encodings. Both vectors must outlive the
// result.
std::vector<ModelInput> MakeInputs(const Corpus &corpus,
                                   const std::vector<EncodedDocument> &encodings);

// One positive decision: a relation whose logit beats the threshold.
struct ScoredTriplet {
  Triplet triplet;
  double score = 0.0;  // logistic probability of the relation logit
};

std::vector<ScoredTriplet> PredictCorpus(const ModelParams &params,
                                         const std::vector<ModelInput> &inputs, int jobs = 1);

TripletSet ToTripletSet(const std::vector<ScoredTriplet> &predictions);

// Prediction dump: header line, then "doc_id<TAB>head<TAB>tail<TAB>relation
// <TAB>score" per positive decision.
inline constexpr std::string_view kPredictionHeader = "# pairre-predictions v1";
void WritePredictions(const std::vector<ScoredTriplet> &predictions, std::ostream &out);
std::vector<ScoredTriplet> ReadPredictions(std::istream &in);

// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
void ParallelFor(int n, int jobs, const std::function<void(int)> &fn);

}  // namespace pairre

#endif  // PAIRRE_PIPELINE_H_
