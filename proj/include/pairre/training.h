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

#ifndef PAIRRE_TRAINING_H_
#define PAIRRE_TRAINING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "pairre/model.h"
#include "pairre/optimizer.h"

namespace pairre {

struct TrainConfig {
  ModelConfig model;
  double lr_head = 1e-4;
  // Rate for encoder weights. Kept for a real encoder; the mock encoder
  // has no trainable weights.
  double lr_encoder = 2e-5;
  double warmup_fraction = 0.06;
  // 0 means epochs * batches per epoch.
  std::int64_t total_steps = 0;
  int epochs = 30;
  int batch_size = 4;
  std::uint64_t seed = 7;
  AdamWConfig adamw;
  int jobs = 1;

  void Validate() const;
};

void to_json(nlohmann::json &j, const TrainConfig &cfg);
void from_json(const nlohmann::json &j, TrainConfig &cfg);

struct LossPoint {
  std::int64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct EpochReport {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_f1 = 0.0;
  std::optional<double> dev_f1;
};

struct TrainResult {
  ModelParams params;
  AdamWState optimizer;
  std::vector<LossPoint> curve;
  std::vector<EpochReport> epochs;
  // Set when a step produced a non-finite loss; `params` then holds the
  // last finite parameters.
  bool diverged = false;
  std::string divergence;
};

// Mean over documents of the per-document mean pair loss. Documents with
// fewer than two entities are skipped. If `grad` is non-null it receives
// the flat gradient in ModelParams::Layout order.
double LossAndGradient(const ModelParams &params, const std::vector<ModelInput> &batch,
                       int jobs, Eigen::VectorXd *grad);

// Called after every epoch; may be empty.
using EpochCallback = std::function<void(const EpochReport &)>;

// Trains from a fresh orthogonal initialization (seeded by cfg.seed), or
// from `init` when given. Deterministic in its inputs.
TrainResult Train(const std::vector<ModelInput> &train, const TrainConfig &cfg,
                  const std::vector<ModelInput> *dev = nullptr,
                  const ModelParams *init = nullptr, const EpochCallback &on_epoch = {});

// Checkpoint file, little-endian:
//   "PRCK", u32 version, u64 metadata length, metadata JSON (contains the
//   model config under "model"), u64 parameter count, f64[] parameters,
//   u8 has_optimizer, then optionally i64 updates, f64[] first moment,
//   f64[] second moment.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  std::optional<AdamWState> optimizer;
  nlohmann::json metadata;
};

void SaveCheckpoint(const std::string &path, const ModelParams &params,
                    const AdamWState *optimizer = nullptr,
                    const nlohmann::json &metadata = nlohmann::json::object());
Checkpoint LoadCheckpoint(const std::string &path);

// "step,lr,loss" rows with round-trip precision.
void WriteLossCurve(const std::vector<LossPoint> &curve, std::ostream &out);

struct GradCheckConfig {
  ModelConfig model;  // num_relations and num_types are taken from here
  int num_entities = 3;
  int num_docs = 1;
  std::uint64_t seed = 7;
  double step = 1e-5;
  double tolerance = 1e-4;
  // Relative errors use max(|analytic|, |numeric|, denominator_floor).
  double denominator_floor = 1e-6;
  // Models with more parameters check a seeded random subset of this
  // fraction instead of every index.
  Eigen::Index full_check_limit = 20000;
  double subset_fraction = 0.25;

  // d=8, k=2, L=1, R=2, m=3, one document.
  static GradCheckConfig Tiny();
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  Eigen::Index worst_index = -1;
  std::string worst_param;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  Eigen::Index num_params = 0;
  Eigen::Index num_checked = 0;
  std::vector<Eigen::Index> nonfinite;  // indices with a non-finite quotient
  bool passed = false;
};

// Compares the reverse-mode gradient of a random tiny instance against
// central differences. `tamper` may modify the analytic gradient before
// the comparison (fault injection in tests).
GradCheckReport GradCheck(const GradCheckConfig &cfg,
                          const std::function<void(Eigen::VectorXd &)> &tamper = {});

nlohmann::json ToJson(const GradCheckReport &report);

}  // namespace pairre

#endif  // PAIRRE_TRAINING_H_
