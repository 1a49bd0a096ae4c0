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

#include "pairre/training.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

#include "binary_io.h"
#include "pairre/bind.h"
#include "pairre/error.h"
#include "pairre/pipeline.h"

namespace pairre {

using nlohmann::json;

void TrainConfig::Validate() const {
  model.Validate();
  if (!(lr_head >= 0.0)) throw ConfigError("learning rate must be >= 0");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw ConfigError("warmup fraction must lie in [0, 1)");
  }
  if (total_steps < 0) throw ConfigError("total steps must be >= 0");
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (adamw.weight_decay < 0.0) throw ConfigError("weight decay must be >= 0");
  if (jobs <= 0) throw ConfigError("jobs must be positive");
}

void to_json(json &j, const TrainConfig &cfg) {
  j = {{"model", cfg.model},
       {"lr_head", cfg.lr_head},
       {"lr_encoder", cfg.lr_encoder},
       {"warmup_fraction", cfg.warmup_fraction},
       {"total_steps", cfg.total_steps},
       {"epochs", cfg.epochs},
       {"batch_size", cfg.batch_size},
       {"seed", cfg.seed},
       {"weight_decay", cfg.adamw.weight_decay},
       {"beta1", cfg.adamw.beta1},
       {"beta2", cfg.adamw.beta2},
       {"epsilon", cfg.adamw.epsilon}};
}

void from_json(const json &j, TrainConfig &cfg) {
  if (j.contains("model")) {
    ModelConfig model = cfg.model;
    from_json(j.at("model"), model);
    cfg.model = model;
  }
  cfg.lr_head = j.value("lr_head", cfg.lr_head);
  cfg.lr_encoder = j.value("lr_encoder", cfg.lr_encoder);
  cfg.warmup_fraction = j.value("warmup_fraction", cfg.warmup_fraction);
  cfg.total_steps = j.value("total_steps", cfg.total_steps);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.adamw.weight_decay = j.value("weight_decay", cfg.adamw.weight_decay);
  cfg.adamw.beta1 = j.value("beta1", cfg.adamw.beta1);
  cfg.adamw.beta2 = j.value("beta2", cfg.adamw.beta2);
  cfg.adamw.epsilon = j.value("epsilon", cfg.adamw.epsilon);
}

namespace {

double DocumentLoss(const ModelParams &params, const ModelInput &input, Eigen::VectorXd *grad) {
  ad::Tape tape;
  ModelVars vars = BindToTape(tape, static_cast<const ModelWeights<Eigen::MatrixXd> &>(params),
                              grad != nullptr);
  ForwardResult fwd = Forward(tape, vars, params.config(), input, true);
  if (grad != nullptr) {
    tape.Backprop(fwd.loss);
    grad->resize(params.NumParams());
    Eigen::Index offset = 0;
    VisitFields(vars, [&](const std::string &, const ad::Var &v) {
      grad->segment(offset, v.value().size()) = v.grad().reshaped();
      offset += v.value().size();
    });
  }
  return fwd.loss.scalar();
}

TripletSet GoldOf(const std::vector<ModelInput> &inputs) {
  TripletSet gold;
  for (const ModelInput &in : inputs) {
    for (const RelationFact &f : in.doc->gold_facts) {
      gold.insert({in.doc->doc_id, f.head, f.tail, f.relation});
    }
  }
  return gold;
}

double MicroF1On(const ModelParams &params, const std::vector<ModelInput> &inputs, int jobs) {
  return MicroF1(ToTripletSet(PredictCorpus(params, inputs, jobs)), GoldOf(inputs)).f1;
}

}  // namespace

double LossAndGradient(const ModelParams &params, const std::vector<ModelInput> &batch,
                       int jobs, Eigen::VectorXd *grad) {
  std::vector<int> usable;
  for (int i = 0; i < static_cast<int>(batch.size()); ++i) {
    if (batch[i].doc->num_entities() >= 2) usable.push_back(i);
  }
  if (usable.empty()) throw Error("batch has no document with two or more entities");
  const int n = static_cast<int>(usable.size());
  std::vector<double> losses(n);
  std::vector<Eigen::VectorXd> grads(grad != nullptr ? n : 0);
  ParallelFor(n, jobs, [&](int i) {
    losses[i] = DocumentLoss(params, batch[usable[i]], grad != nullptr ? &grads[i] : nullptr);
  });
  // Reduce in document order so the result does not depend on scheduling.
  double total = 0.0;
  for (double l : losses) total += l;
  if (grad != nullptr) {
    *grad = Eigen::VectorXd::Zero(params.NumParams());
    for (const auto &g : grads) *grad += g;
    *grad /= n;
  }
  return total / n;
}

TrainResult Train(const std::vector<ModelInput> &train, const TrainConfig &cfg,
                  const std::vector<ModelInput> *dev, const ModelParams *init,
                  const EpochCallback &on_epoch) {
  cfg.Validate();
  TrainResult result;
  result.params = init != nullptr ? *init : ModelParams::Initialize(cfg.model, cfg.seed);
  std::vector<int> usable;
  for (int i = 0; i < static_cast<int>(train.size()); ++i) {
    if (train[i].doc->num_entities() >= 2) usable.push_back(i);
  }
  if (usable.empty()) throw Error("training corpus has no document with two or more entities");

  const std::int64_t per_epoch =
      (static_cast<std::int64_t>(usable.size()) + cfg.batch_size - 1) / cfg.batch_size;
  LrSchedule schedule;
  schedule.peak = cfg.lr_head;
  schedule.total_steps = cfg.total_steps > 0 ? cfg.total_steps : per_epoch * cfg.epochs;
  schedule.warmup_steps =
      static_cast<std::int64_t>(std::floor(cfg.warmup_fraction * schedule.total_steps));

  result.optimizer = AdamWState::Zeros(result.params.NumParams());
  std::mt19937_64 rng(cfg.seed ^ 0x5eedf00dULL);
  std::int64_t step = 0;
  Eigen::VectorXd flat = result.params.Flatten();
  Eigen::VectorXd grad;
  for (int epoch = 1; epoch <= cfg.epochs && step < schedule.total_steps; ++epoch) {
    std::vector<int> order = usable;
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int batches = 0;
    for (size_t begin = 0; begin < order.size() && step < schedule.total_steps;
         begin += cfg.batch_size) {
      std::vector<ModelInput> batch;
      for (size_t i = begin; i < std::min(order.size(), begin + cfg.batch_size); ++i) {
        batch.push_back(train[order[i]]);
      }
      const double lr = schedule.At(step);
      double loss;
      try {
        loss = LossAndGradient(result.params, batch, cfg.jobs, &grad);
      } catch (const NonFiniteError &ex) {
        result.diverged = true;
        result.divergence = ex.what();
        return result;
      }
      if (!std::isfinite(loss) || !grad.allFinite()) {
        result.diverged = true;
        result.divergence = "non-finite loss or gradient at step " + std::to_string(step);
        return result;
      }
      result.curve.push_back({step, lr, loss});
      AdamWStep(flat, grad, result.optimizer, lr, cfg.adamw);
      result.params.Unflatten(flat);
      epoch_loss += loss;
      ++batches;
      ++step;
    }
    EpochReport report;
    report.epoch = epoch;
    report.mean_loss = batches > 0 ? epoch_loss / batches : 0.0;
    report.train_f1 = MicroF1On(result.params, train, cfg.jobs);
    if (dev != nullptr && !dev->empty()) report.dev_f1 = MicroF1On(result.params, *dev, cfg.jobs);
    result.epochs.push_back(report);
    if (on_epoch) on_epoch(report);
  }
  return result;
}

void SaveCheckpoint(const std::string &path, const ModelParams &params,
                    const AdamWState *optimizer, const json &metadata) {
  json meta = metadata;
  meta["model"] = params.config();
  const std::string meta_text = meta.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write("PRCK", 4);
  binary::WriteU32(out, kCheckpointVersion);
  binary::WriteU64(out, meta_text.size());
  out.write(meta_text.data(), static_cast<std::streamsize>(meta_text.size()));
  Eigen::VectorXd flat = params.Flatten();
  binary::WriteU64(out, flat.size());
  for (double v : flat) binary::WriteF64(out, v);
  out.put(optimizer != nullptr ? 1 : 0);
  if (optimizer != nullptr) {
    binary::WriteU64(out, static_cast<std::uint64_t>(optimizer->updates));
    for (double v : optimizer->first_moment) binary::WriteF64(out, v);
    for (double v : optimizer->second_moment) binary::WriteF64(out, v);
  }
  if (!out) throw Error("failed writing '" + path + "'");
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "PRCK", 4) != 0) {
    throw ParseError("'" + path + "' is not a checkpoint");
  }
  std::uint32_t version = binary::ReadU32(in, path);
  if (version != kCheckpointVersion) {
    throw ParseError("'" + path + "' has unsupported checkpoint version " +
                     std::to_string(version));
  }
  std::uint64_t meta_len = binary::ReadU64(in, path);
  if (meta_len > (1u << 24)) throw ParseError("'" + path + "' metadata is corrupt");
  std::string meta_text(meta_len, '\0');
  if (!in.read(meta_text.data(), static_cast<std::streamsize>(meta_len))) {
    throw ParseError("'" + path + "' is truncated");
  }
  Checkpoint ckpt;
  ModelConfig config;
  try {
    ckpt.metadata = json::parse(meta_text);
    config = ckpt.metadata.at("model").get<ModelConfig>();
  } catch (const json::exception &ex) {
    throw ParseError("'" + path + "' metadata is invalid: " + ex.what());
  }
  ckpt.params = ModelParams::Zeros(config);
  const std::uint64_t count = binary::ReadU64(in, path);
  if (count != static_cast<std::uint64_t>(ckpt.params.NumParams())) {
    throw DimensionError("checkpoint '" + path + "' holds " + std::to_string(count) +
                         " parameters but its config implies " +
                         std::to_string(ckpt.params.NumParams()));
  }
  Eigen::VectorXd flat(count);
  for (auto &v : flat) v = binary::ReadF64(in, path);
  ckpt.params.Unflatten(flat);
  int has_state = in.get();
  if (has_state == 1) {
    AdamWState state = AdamWState::Zeros(static_cast<Eigen::Index>(count));
    state.updates = static_cast<std::int64_t>(binary::ReadU64(in, path));
    for (auto &v : state.first_moment) v = binary::ReadF64(in, path);
    for (auto &v : state.second_moment) v = binary::ReadF64(in, path);
    ckpt.optimizer = std::move(state);
  } else if (has_state != 0) {
    throw ParseError("'" + path + "' is truncated");
  }
  return ckpt;
}

void WriteLossCurve(const std::vector<LossPoint> &curve, std::ostream &out) {
  out << "step,lr,loss\n";
  char line[96];
  for (const LossPoint &p : curve) {
    std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g\n", static_cast<long long>(p.step),
                  p.lr, p.loss);
    out << line;
  }
}

GradCheckConfig GradCheckConfig::Tiny() {
  GradCheckConfig cfg;
  cfg.model.dim = 8;
  cfg.model.groups = 2;
  cfg.model.gnn_layers = 1;
  cfg.model.num_relations = 2;
  cfg.model.num_types = 2;
  cfg.num_entities = 3;
  cfg.num_docs = 1;
  return cfg;
}

GradCheckReport GradCheck(const GradCheckConfig &cfg,
                          const std::function<void(Eigen::VectorXd &)> &tamper) {
  cfg.model.Validate();
  SynthConfig synth;
  synth.num_docs = cfg.num_docs;
  synth.entities_per_doc = cfg.num_entities;
  synth.num_relations = cfg.model.num_relations;
  synth.num_types = cfg.model.num_types;
  synth.mentions_per_entity = 2;
  synth.sentences_per_doc = 2;
  synth.max_facts_per_doc = 2;
  synth.vocab_size = 64;
  synth.seed = cfg.seed;
  Corpus corpus = SynthCorpus(synth);
  EncoderConfig enc_cfg;
  enc_cfg.dim = cfg.model.dim;
  enc_cfg.seed = cfg.seed;
  std::vector<EncodedDocument> encodings = EncodeCorpus(corpus, enc_cfg);
  std::vector<ModelInput> inputs = MakeInputs(corpus, encodings);

  // Orthogonal weights plus noise so biases and norm scales are generic.
  ModelParams params = ModelParams::Initialize(cfg.model, cfg.seed);
  Eigen::VectorXd flat = params.Flatten();
  std::mt19937_64 rng(cfg.seed + 1);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (auto &v : flat) v += noise(rng);
  params.Unflatten(flat);

  GradCheckReport report;
  report.num_params = flat.size();
  Eigen::VectorXd analytic;
  LossAndGradient(params, inputs, 1, &analytic);
  if (tamper) tamper(analytic);

  std::vector<Eigen::Index> indices(flat.size());
  std::iota(indices.begin(), indices.end(), 0);
  if (flat.size() > cfg.full_check_limit) {
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(static_cast<size_t>(std::ceil(cfg.subset_fraction * flat.size())));
    std::sort(indices.begin(), indices.end());
  }

  ModelParams probe = params;
  for (Eigen::Index i : indices) {
    Eigen::VectorXd shifted = flat;
    shifted[i] = flat[i] + cfg.step;
    probe.Unflatten(shifted);
    double plus = LossAndGradient(probe, inputs, 1, nullptr);
    shifted[i] = flat[i] - cfg.step;
    probe.Unflatten(shifted);
    double minus = LossAndGradient(probe, inputs, 1, nullptr);
    double numeric = (plus - minus) / (2.0 * cfg.step);
    ++report.num_checked;
    if (!std::isfinite(numeric) || !std::isfinite(analytic[i])) {
      report.nonfinite.push_back(i);
      continue;
    }
    double denom = std::max({std::abs(analytic[i]), std::abs(numeric), cfg.denominator_floor});
    double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > report.max_rel_err || report.worst_index < 0) {
      report.max_rel_err = rel;
      report.worst_index = i;
      report.worst_analytic = analytic[i];
      report.worst_numeric = numeric;
    }
  }
  if (report.worst_index >= 0) report.worst_param = params.NameOf(report.worst_index);
  report.passed = report.nonfinite.empty() && report.max_rel_err <= cfg.tolerance;
  return report;
}

json ToJson(const GradCheckReport &report) {
  return {{"max_rel_err", report.max_rel_err},
          {"worst_index", report.worst_index},
          {"worst_param", report.worst_param},
          {"worst_analytic", report.worst_analytic},
          {"worst_numeric", report.worst_numeric},
          {"num_params", report.num_params},
          {"num_checked", report.num_checked},
          {"nonfinite", report.nonfinite},
          {"passed", report.passed}};
}

}  // namespace pairre
