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

// Command-line entry points: ingest, synth, encode, train, eval, predict,
// gradcheck and inspect-graph.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pairre/corpus.h"
#include "pairre/encoder.h"
#include "pairre/error.h"
#include "pairre/metrics.h"
#include "pairre/model.h"
#include "pairre/pairgraph.h"
#include "pairre/pipeline.h"
#include "pairre/training.h"
#include "pairre/version.h"

namespace pairre {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 3;
constexpr const char *kDataDirEnv = "PAIRRE_DATA_DIR";

// Relative inputs missing from the working directory are looked up under
// $PAIRRE_DATA_DIR.
std::string ResolveInput(const std::string &path) {
  if (fs::exists(path)) return path;
  const char *dir = std::getenv(kDataDirEnv);
  if (dir != nullptr && fs::path(path).is_relative()) {
    fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw Error("input not found: " + path);
}

json LoadJsonFile(const std::string &path) {
  std::ifstream in(ResolveInput(path));
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(path + " is not a JSON object");
  return j;
}

void PrepareOutput(const std::string &path) {
  fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void WriteText(const std::string &path, const std::string &text) {
  PrepareOutput(path);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

class RunManifest {
 public:
  explicit RunManifest(std::string command)
      : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  void SetConfig(json config) { config_ = std::move(config); }
  void SetSeed(std::uint64_t seed) { seed_ = seed; }
  void AddInput(const std::string &path) { inputs_.push_back(path); }
  void AddOutput(const std::string &path) { outputs_.push_back(path); }

  void Write(const std::string &path) const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json j = {{"command", command_},
              {"version", std::string(kVersion)},
              {"config", config_},
              {"seed", seed_ ? json(*seed_) : json(nullptr)},
              {"inputs", inputs_},
              {"outputs", outputs_},
              {"wall_clock_seconds", seconds}};
    WriteText(path, j.dump(2) + "\n");
  }

 private:
  std::string command_;
  json config_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

std::string ManifestPath(const std::string &output) { return output + ".manifest.json"; }

// Mock-encodes the corpus, or loads "<index>.enc" files from `dir`.
std::vector<EncodedDocument> Encodings(const Corpus &corpus, const EncoderConfig &cfg,
                                       const std::string &dir, RunManifest &manifest) {
  if (dir.empty()) return EncodeCorpus(corpus, cfg);
  const std::string root = ResolveInput(dir);
  manifest.AddInput(root);
  std::vector<EncodedDocument> out;
  for (size_t i = 0; i < corpus.docs.size(); ++i) {
    MarkedDocument marked = InsertMarkers(corpus.docs[i]);
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.enc", i);
    out.push_back(LoadEncoding((fs::path(root) / name).string(), &marked, cfg.dim));
  }
  return out;
}

Corpus LoadInputCorpus(const std::string &path, RunManifest &manifest) {
  const std::string resolved = ResolveInput(path);
  manifest.AddInput(resolved);
  return LoadCorpus(resolved);
}

// Options shared by the model-building commands. Values apply only when the
// flag was given, so they override the config file.
struct ModelFlags {
  int dim = 0;
  int groups = 0;
  int gnn_layers = 0;
  std::string bilinear;
  std::string summand;
  bool no_integration = false;
  CLI::Option *dim_opt = nullptr;
  CLI::Option *groups_opt = nullptr;
  CLI::Option *layers_opt = nullptr;
  CLI::Option *bilinear_opt = nullptr;
  CLI::Option *summand_opt = nullptr;

  void Register(CLI::App *app) {
    dim_opt = app->add_option("--dim", dim, "Hidden size d of encoder and head");
    groups_opt = app->add_option("--groups", groups, "Number of bilinear groups k");
    layers_opt = app->add_option("--gnn-layers", gnn_layers, "Number of graph layers L");
    bilinear_opt = app->add_option("--bilinear", bilinear, "Group bilinear output")
                       ->check(CLI::IsMember({"vector", "scalar"}));
    summand_opt = app->add_option("--gnn-summand", summand, "Attention-weighted embedding")
                      ->check(CLI::IsMember({"neighbor", "self"}));
    app->add_flag("--no-mention-integration", no_integration,
                  "Pool mentions by their plain mean");
  }

  void Apply(ModelConfig &model) const {
    if (dim_opt->count()) model.dim = dim;
    if (groups_opt->count()) model.groups = groups;
    if (layers_opt->count()) model.gnn_layers = gnn_layers;
    if (bilinear_opt->count()) model.bilinear = ParseBilinearMode(bilinear);
    if (summand_opt->count()) model.summand = ParseGnnSummand(summand);
    if (no_integration) model.mention_integration = false;
  }
};

struct EncoderFlags {
  int window = 0;
  int overlap = 0;
  std::uint64_t seed = 0;
  CLI::Option *window_opt = nullptr;
  CLI::Option *overlap_opt = nullptr;
  CLI::Option *seed_opt = nullptr;

  void Register(CLI::App *app) {
    window_opt = app->add_option("--window", window, "Encoder window width in tokens");
    overlap_opt = app->add_option("--overlap", overlap, "Overlap between encoder windows");
    seed_opt = app->add_option("--encoder-seed", seed, "Seed of the mock encoder");
  }

  void Apply(EncoderConfig &cfg) const {
    if (window_opt->count()) cfg.window = window;
    if (overlap_opt->count()) cfg.overlap = overlap;
    if (seed_opt->count()) cfg.seed = seed;
  }
};

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

int RunIngest(const IngestArgs &args) {
  if (args.inputs.size() != args.outputs.size()) {
    throw ConfigError("ingest needs one --out per --input");
  }
  RunManifest manifest("ingest");
  Vocabulary vocab;
  IdMap relations, types;
  std::vector<std::vector<Document>> splits;
  for (const std::string &path : args.inputs) {
    const std::string resolved = ResolveInput(path);
    manifest.AddInput(resolved);
    std::ifstream in(resolved);
    json records = json::parse(in, nullptr, false);
    if (records.is_discarded()) throw ParseError(resolved + ": malformed JSON");
    splits.push_back(ParseDocredSplit(records, vocab, relations, types));
  }
  for (size_t i = 0; i < splits.size(); ++i) {
    Corpus corpus;
    corpus.num_relations = relations.size();
    corpus.num_types = types.size();
    corpus.relation_names = relations.names();
    corpus.type_names = types.names();
    corpus.docs = std::move(splits[i]);
    PrepareOutput(args.outputs[i]);
    SaveCorpus(corpus, args.outputs[i]);
    manifest.AddOutput(args.outputs[i]);
    std::fprintf(stderr, "%s: %zu documents, %d relations\n", args.outputs[i].c_str(),
                 corpus.docs.size(), corpus.num_relations);
  }
  manifest.SetConfig({{"vocab_size", vocab.size()}});
  manifest.Write(ManifestPath(args.outputs.front()));
  return 0;
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int docs = 0;
  int entities = 0;
  int relations = 0;
  int mentions = 0;
  CLI::Option *seed_opt = nullptr;
  CLI::Option *docs_opt = nullptr;
  CLI::Option *entities_opt = nullptr;
  CLI::Option *relations_opt = nullptr;
  CLI::Option *mentions_opt = nullptr;
};

int RunSynth(const SynthArgs &args) {
  RunManifest manifest("synth");
  SynthConfig cfg;
  if (!args.config.empty()) {
    json file = LoadJsonFile(args.config);
    manifest.AddInput(args.config);
    if (file.contains("synth")) from_json(file.at("synth"), cfg);
  }
  if (args.seed_opt->count()) cfg.seed = args.seed;
  if (args.docs_opt->count()) cfg.num_docs = args.docs;
  if (args.entities_opt->count()) cfg.entities_per_doc = args.entities;
  if (args.relations_opt->count()) cfg.num_relations = args.relations;
  if (args.mentions_opt->count()) cfg.mentions_per_entity = args.mentions;
  Corpus corpus = SynthCorpus(cfg);
  PrepareOutput(args.out);
  SaveCorpus(corpus, args.out);
  manifest.SetConfig(cfg);
  manifest.SetSeed(cfg.seed);
  manifest.AddOutput(args.out);
  manifest.Write(ManifestPath(args.out));
  return 0;
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string config;
  std::string corpus;
  std::string out;
  int dim = 0;
  CLI::Option *dim_opt = nullptr;
  EncoderFlags encoder;
};

EncoderConfig EncoderFromConfigFile(const json &file) {
  EncoderConfig cfg;
  if (file.contains("encoder")) from_json(file.at("encoder"), cfg);
  return cfg;
}

int RunEncode(const EncodeArgs &args) {
  RunManifest manifest("encode");
  json file = json::object();
  if (!args.config.empty()) {
    file = LoadJsonFile(args.config);
    manifest.AddInput(args.config);
  }
  EncoderConfig cfg = EncoderFromConfigFile(file);
  args.encoder.Apply(cfg);
  if (args.dim_opt->count()) cfg.dim = args.dim;
  Corpus corpus = LoadInputCorpus(args.corpus, manifest);
  std::vector<EncodedDocument> encodings = EncodeCorpus(corpus, cfg);
  fs::create_directories(args.out);
  for (size_t i = 0; i < encodings.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.enc", i);
    SaveEncoding(encodings[i], (fs::path(args.out) / name).string());
  }
  manifest.SetConfig(cfg);
  manifest.SetSeed(cfg.seed);
  manifest.AddOutput(args.out);
  manifest.Write(ManifestPath(args.out));
  return 0;
}

// ----------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string corpus;
  std::string dev;
  std::string out;
  std::string curve;
  std::string encodings;
  std::string init;
  int jobs = 1;
  std::uint64_t seed = 0;
  double lr = 0.0;
  double warmup = 0.0;
  std::int64_t steps = 0;
  int epochs = 0;
  int batch_size = 0;
  double weight_decay = 0.0;
  CLI::Option *seed_opt = nullptr;
  CLI::Option *lr_opt = nullptr;
  CLI::Option *warmup_opt = nullptr;
  CLI::Option *steps_opt = nullptr;
  CLI::Option *epochs_opt = nullptr;
  CLI::Option *batch_opt = nullptr;
  CLI::Option *wd_opt = nullptr;
  ModelFlags model;
  EncoderFlags encoder;
};

int RunTrain(const TrainArgs &args) {
  RunManifest manifest("train");
  json file = json::object();
  if (!args.config.empty()) {
    file = LoadJsonFile(args.config);
    manifest.AddInput(args.config);
  }
  TrainConfig cfg;
  if (file.contains("train")) from_json(file.at("train"), cfg);
  EncoderConfig enc = EncoderFromConfigFile(file);
  // The encoder and the model share d; a value given for only one of them
  // applies to both.
  const bool model_dim_set = file.contains("train") && file.at("train").contains("model") &&
                             file.at("train").at("model").contains("dim");
  const bool encoder_dim_set = file.contains("encoder") && file.at("encoder").contains("dim");
  if (model_dim_set && !encoder_dim_set) enc.dim = cfg.model.dim;
  if (encoder_dim_set && !model_dim_set) cfg.model.dim = enc.dim;
  args.model.Apply(cfg.model);
  args.encoder.Apply(enc);
  if (args.model.dim_opt->count()) enc.dim = args.model.dim;
  if (args.seed_opt->count()) cfg.seed = args.seed;
  if (args.lr_opt->count()) cfg.lr_head = args.lr;
  if (args.warmup_opt->count()) cfg.warmup_fraction = args.warmup;
  if (args.steps_opt->count()) cfg.total_steps = args.steps;
  if (args.epochs_opt->count()) cfg.epochs = args.epochs;
  if (args.batch_opt->count()) cfg.batch_size = args.batch_size;
  if (args.wd_opt->count()) cfg.adamw.weight_decay = args.weight_decay;
  cfg.jobs = args.jobs;
  if (enc.dim != cfg.model.dim) {
    throw DimensionError("encoder dim " + std::to_string(enc.dim) + " does not match model dim " +
                         std::to_string(cfg.model.dim));
  }

  Corpus train = LoadInputCorpus(args.corpus, manifest);
  cfg.model.num_relations = train.num_relations;
  cfg.model.num_types = std::max(1, train.num_types);
  cfg.Validate();
  std::optional<Corpus> dev;
  if (!args.dev.empty()) {
    dev = LoadInputCorpus(args.dev, manifest);
    if (dev->num_relations != train.num_relations) {
      throw DimensionError("dev corpus has " + std::to_string(dev->num_relations) +
                           " relations, training corpus has " +
                           std::to_string(train.num_relations));
    }
  }
  std::optional<ModelParams> init;
  if (!args.init.empty()) {
    const std::string resolved = ResolveInput(args.init);
    manifest.AddInput(resolved);
    init = LoadCheckpoint(resolved).params;
    if (init->NumParams() != ModelParams::Zeros(cfg.model).NumParams()) {
      throw DimensionError("initial checkpoint does not match the model configuration");
    }
  }
  std::vector<EncodedDocument> train_enc = Encodings(train, enc, args.encodings, manifest);
  std::vector<ModelInput> train_inputs = MakeInputs(train, train_enc);
  std::vector<EncodedDocument> dev_enc;
  std::vector<ModelInput> dev_inputs;
  if (dev) {
    dev_enc = EncodeCorpus(*dev, enc);
    dev_inputs = MakeInputs(*dev, dev_enc);
  }

  TrainResult result = Train(train_inputs, cfg, dev ? &dev_inputs : nullptr,
                             init ? &*init : nullptr, [](const EpochReport &r) {
                               std::fprintf(stderr, "epoch %d loss %.6f train_f1 %.4f", r.epoch,
                                            r.mean_loss, r.train_f1);
                               if (r.dev_f1) std::fprintf(stderr, " dev_f1 %.4f", *r.dev_f1);
                               std::fprintf(stderr, "\n");
                             });
  if (result.diverged) std::fprintf(stderr, "warning: %s\n", result.divergence.c_str());

  json config = {{"train", cfg}, {"encoder", enc}};
  json metadata = config;
  metadata["relation_names"] = train.relation_names;
  metadata["type_names"] = train.type_names;
  PrepareOutput(args.out);
  SaveCheckpoint(args.out, result.params, &result.optimizer, metadata);
  manifest.AddOutput(args.out);
  if (!args.curve.empty()) {
    std::ostringstream csv;
    WriteLossCurve(result.curve, csv);
    WriteText(args.curve, csv.str());
    manifest.AddOutput(args.curve);
  }
  manifest.SetConfig(config);
  manifest.SetSeed(cfg.seed);
  manifest.Write(ManifestPath(args.out));
  return result.diverged ? kExitError : 0;
}

// ------------------------------------------------------- eval / predict

struct ScoreArgs {
  std::string corpus;
  std::string checkpoint;
  std::string out;
  std::string encodings;
  std::string train_corpus;
  std::string infer_eval = "all";
  int jobs = 1;
  int dim = 0;
  CLI::Option *dim_opt = nullptr;
};

struct LoadedModel {
  Checkpoint checkpoint;
  Corpus corpus;
  std::vector<EncodedDocument> encodings;
  std::vector<ModelInput> inputs;
};

// Loads and cross-checks checkpoint, corpus and encodings.
void LoadForScoring(const ScoreArgs &args, RunManifest &manifest, LoadedModel &m) {
  const std::string ckpt = ResolveInput(args.checkpoint);
  manifest.AddInput(ckpt);
  m.checkpoint = LoadCheckpoint(ckpt);
  const ModelConfig &model = m.checkpoint.params.config();
  EncoderConfig enc;
  enc.dim = model.dim;
  if (m.checkpoint.metadata.contains("encoder")) {
    from_json(m.checkpoint.metadata.at("encoder"), enc);
  }
  if (args.dim_opt->count()) enc.dim = args.dim;
  if (enc.dim != model.dim) {
    throw DimensionError("encoder dim " + std::to_string(enc.dim) +
                         " does not match checkpoint dim " + std::to_string(model.dim));
  }
  m.corpus = LoadInputCorpus(args.corpus, manifest);
  if (m.corpus.num_relations != model.num_relations) {
    throw DimensionError("corpus has " + std::to_string(m.corpus.num_relations) +
                         " relations, checkpoint has " + std::to_string(model.num_relations));
  }
  for (const Document &doc : m.corpus.docs) {
    for (const Entity &e : doc.entities) {
      if (e.entity_type >= model.num_types) {
        throw DimensionError("document " + doc.doc_id + " uses entity type " +
                             std::to_string(e.entity_type) + ", checkpoint has " +
                             std::to_string(model.num_types));
      }
    }
  }
  m.encodings = Encodings(m.corpus, enc, args.encodings, manifest);
  m.inputs = MakeInputs(m.corpus, m.encodings);
  manifest.SetConfig({{"model", model}, {"encoder", enc}});
}

int RunEval(const ScoreArgs &args) {
  RunManifest manifest("eval");
  const InferScope scope = ParseInferScope(args.infer_eval);
  LoadedModel m;
  LoadForScoring(args, manifest, m);
  std::set<FactKey> train_facts;
  if (!args.train_corpus.empty()) {
    train_facts = TrainFacts(LoadInputCorpus(args.train_corpus, manifest));
  }
  std::vector<ScoredTriplet> preds = PredictCorpus(m.checkpoint.params, m.inputs, args.jobs);
  MetricsReport report = ComputeMetrics(ToTripletSet(preds), m.corpus, train_facts, scope);
  json metrics = ToJson(report);
  WriteText(args.out, metrics.dump(2) + "\n");
  manifest.AddOutput(args.out);
  manifest.Write(ManifestPath(args.out));
  std::fprintf(stderr, "f1 %.4f ign_f1 %.4f intra_f1 %.4f inter_f1 %.4f infer_f1 %.4f\n",
               report.micro.f1, report.ign.f1, report.intra_inter.intra.f1,
               report.intra_inter.inter.f1, report.infer.score.f1);
  return 0;
}

int RunPredict(const ScoreArgs &args) {
  RunManifest manifest("predict");
  LoadedModel m;
  LoadForScoring(args, manifest, m);
  std::vector<ScoredTriplet> preds = PredictCorpus(m.checkpoint.params, m.inputs, args.jobs);
  std::ostringstream out;
  WritePredictions(preds, out);
  WriteText(args.out, out.str());
  manifest.AddOutput(args.out);
  manifest.Write(ManifestPath(args.out));
  return 0;
}

// ------------------------------------------------------------- gradcheck

struct GradCheckArgs {
  std::string out;
  std::uint64_t seed = 7;
  int entities = 3;
  int relations = 2;
  double tolerance = 1e-4;
  ModelFlags model;
};

int RunGradCheck(const GradCheckArgs &args) {
  GradCheckConfig cfg = GradCheckConfig::Tiny();
  args.model.Apply(cfg.model);
  cfg.seed = args.seed;
  cfg.num_entities = args.entities;
  cfg.model.num_relations = args.relations;
  cfg.tolerance = args.tolerance;
  cfg.model.Validate();
  GradCheckReport report = GradCheck(cfg);
  json j = ToJson(report);
  j["tolerance"] = cfg.tolerance;
  if (args.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    WriteText(args.out, j.dump(2) + "\n");
    RunManifest manifest("gradcheck");
    manifest.SetConfig({{"model", cfg.model}, {"num_entities", cfg.num_entities}});
    manifest.SetSeed(cfg.seed);
    manifest.AddOutput(args.out);
    manifest.Write(ManifestPath(args.out));
  }
  std::fprintf(stderr, "max_rel_err %.3e at %s (%s)\n", report.max_rel_err,
               report.worst_param.c_str(), report.passed ? "pass" : "FAIL");
  return report.passed ? 0 : kExitCheckFailed;
}

// --------------------------------------------------------- inspect-graph

struct InspectArgs {
  std::string corpus;
  std::string doc_id;
  std::string out;
};

int RunInspectGraph(const InspectArgs &args) {
  RunManifest manifest("inspect-graph");
  Corpus corpus = LoadInputCorpus(args.corpus, manifest);
  CorpusIndex index(corpus);
  const Document &doc = index.Get(args.doc_id);
  PairGraph graph = BuildPairGraph(doc.num_entities());
  std::ostringstream text;
  text << "doc " << doc.doc_id << ": " << doc.num_entities() << " entities, " << graph.size()
       << " nodes\n";
  for (const Entity &e : doc.entities) {
    text << "entity " << e.entity_id << " type " << e.entity_type << " mentions "
         << e.mentions.size();
    if (!e.names.empty()) text << " \"" << e.names.front() << "\"";
    text << "\n";
  }
  text << graph.ToText();
  if (args.out.empty()) {
    std::cout << text.str();
  } else {
    WriteText(args.out, text.str());
    manifest.SetConfig({{"doc_id", args.doc_id}});
    manifest.AddOutput(args.out);
    manifest.Write(ManifestPath(args.out));
  }
  return 0;
}

int Main(int argc, char **argv) {
  CLI::App app{"Document-level relation extraction head over pluggable encodings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  IngestArgs ingest;
  CLI::App *ingest_cmd = app.add_subcommand("ingest", "Convert DocRED JSON splits to corpora");
  ingest_cmd->add_option("--input", ingest.inputs, "DocRED split file (repeatable)")->required();
  ingest_cmd->add_option("--out", ingest.outputs, "Corpus output per input")->required();

  SynthArgs synth;
  CLI::App *synth_cmd = app.add_subcommand("synth", "Generate a planted-relation corpus");
  synth_cmd->add_option("--config", synth.config, "JSON config file");
  synth_cmd->add_option("--out", synth.out, "Corpus output")->required();
  synth.seed_opt = synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth.docs_opt = synth_cmd->add_option("--docs", synth.docs, "Number of documents");
  synth.entities_opt = synth_cmd->add_option("--entities", synth.entities, "Entities per document");
  synth.relations_opt = synth_cmd->add_option("--relations", synth.relations, "Relation types");
  synth.mentions_opt = synth_cmd->add_option("--mentions", synth.mentions, "Mentions per entity");

  EncodeArgs encode;
  CLI::App *encode_cmd = app.add_subcommand("encode", "Write mock encodings for a corpus");
  encode_cmd->add_option("--config", encode.config, "JSON config file");
  encode_cmd->add_option("--corpus", encode.corpus, "Corpus file")->required();
  encode_cmd->add_option("--out", encode.out, "Output directory")->required();
  encode.dim_opt = encode_cmd->add_option("--dim", encode.dim, "Hidden size d");
  encode.encoder.Register(encode_cmd);

  TrainArgs train;
  CLI::App *train_cmd = app.add_subcommand("train", "Train the relation head");
  train_cmd->add_option("--config", train.config, "JSON config file");
  train_cmd->add_option("--corpus", train.corpus, "Training corpus")->required();
  train_cmd->add_option("--dev", train.dev, "Held-out corpus scored after every epoch");
  train_cmd->add_option("--out", train.out, "Checkpoint output")->required();
  train_cmd->add_option("--curve", train.curve, "Loss curve CSV output");
  train_cmd->add_option("--encodings", train.encodings, "Directory of precomputed encodings");
  train_cmd->add_option("--init", train.init, "Checkpoint to start from");
  train_cmd->add_option("--jobs", train.jobs, "Worker threads")->check(CLI::PositiveNumber);
  train.seed_opt = train_cmd->add_option("--seed", train.seed, "Initialization and shuffle seed");
  train.lr_opt = train_cmd->add_option("--lr", train.lr, "Peak learning rate");
  train.warmup_opt = train_cmd->add_option("--warmup", train.warmup, "Warmup fraction");
  train.steps_opt = train_cmd->add_option("--steps", train.steps, "Total optimizer steps");
  train.epochs_opt = train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train.batch_opt = train_cmd->add_option("--batch-size", train.batch_size, "Documents per step");
  train.wd_opt = train_cmd->add_option("--weight-decay", train.weight_decay, "AdamW decay");
  train.model.Register(train_cmd);
  train.encoder.Register(train_cmd);

  ScoreArgs eval;
  CLI::App *eval_cmd = app.add_subcommand("eval", "Score a checkpoint against gold facts");
  eval_cmd->add_option("--corpus", eval.corpus, "Evaluation corpus")->required();
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--out", eval.out, "Metrics JSON output")->required();
  eval_cmd->add_option("--encodings", eval.encodings, "Directory of precomputed encodings");
  eval_cmd->add_option("--train-corpus", eval.train_corpus, "Training corpus for Ign F1");
  eval_cmd->add_option("--infer-eval", eval.infer_eval, "Facts scored by infer F1")
      ->check(CLI::IsMember({"all", "r3"}));
  eval_cmd->add_option("--jobs", eval.jobs, "Worker threads")->check(CLI::PositiveNumber);
  eval.dim_opt = eval_cmd->add_option("--dim", eval.dim, "Expected hidden size d");

  ScoreArgs predict;
  CLI::App *predict_cmd = app.add_subcommand("predict", "Dump positive relation decisions");
  predict_cmd->add_option("--corpus", predict.corpus, "Corpus to label")->required();
  predict_cmd->add_option("--checkpoint", predict.checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--out", predict.out, "Prediction TSV output")->required();
  predict_cmd->add_option("--encodings", predict.encodings, "Directory of precomputed encodings");
  predict_cmd->add_option("--jobs", predict.jobs, "Worker threads")->check(CLI::PositiveNumber);
  predict.dim_opt = predict_cmd->add_option("--dim", predict.dim, "Expected hidden size d");

  GradCheckArgs gradcheck;
  CLI::App *gradcheck_cmd =
      app.add_subcommand("gradcheck", "Compare gradients with central differences");
  gradcheck_cmd->add_option("--out", gradcheck.out, "Report JSON output (default stdout)");
  gradcheck_cmd->add_option("--seed", gradcheck.seed, "Instance seed");
  gradcheck_cmd->add_option("--entities", gradcheck.entities, "Entities in the document");
  gradcheck_cmd->add_option("--relations", gradcheck.relations, "Relation types");
  gradcheck_cmd->add_option("--tolerance", gradcheck.tolerance, "Largest accepted error");
  gradcheck.model.Register(gradcheck_cmd);

  InspectArgs inspect;
  CLI::App *inspect_cmd = app.add_subcommand("inspect-graph", "Print a document's pair graph");
  inspect_cmd->add_option("--corpus", inspect.corpus, "Corpus file")->required();
  inspect_cmd->add_option("--doc-id", inspect.doc_id, "Document id")->required();
  inspect_cmd->add_option("--out", inspect.out, "Text output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) return RunIngest(ingest);
    if (*synth_cmd) return RunSynth(synth);
    if (*encode_cmd) return RunEncode(encode);
    if (*train_cmd) return RunTrain(train);
    if (*eval_cmd) return RunEval(eval);
    if (*predict_cmd) return RunPredict(predict);
    if (*gradcheck_cmd) return RunGradCheck(gradcheck);
    if (*inspect_cmd) return RunInspectGraph(inspect);
  } catch (const DimensionError &e) {
    std::fprintf(stderr, "pairre: dimension error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "pairre: error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}

}  // namespace
}  // namespace pairre

int main(int argc, char **argv) { return pairre::Main(argc, argv); }
