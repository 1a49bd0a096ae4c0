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

#ifndef PAIRRE_CORPUS_H_
#define PAIRRE_CORPUS_H_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace pairre {

// Reserved token ids. Marker tokens are ordinary vocabulary items for the
// encoder; they only have to be distinct from real tokens.
inline constexpr int kUnknownToken = 0;
inline constexpr int kMarkerStartToken = 1;
inline constexpr int kMarkerEndToken = 2;
inline constexpr int kFirstWordToken = 3;

// Half-open token interval [begin, end) inside one sentence.
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  friend bool operator==(const Span &, const Span &) = default;
};

struct Mention {
  int sent_index = 0;
  Span span;
  int entity_id = 0;

  friend bool operator==(const Mention &, const Mention &) = default;
};

struct Entity {
  int entity_id = 0;
  int entity_type = 0;
  std::vector<Mention> mentions;
  // Surface forms used to identify the same fact across documents.
  std::vector<std::string> names;

  friend bool operator==(const Entity &, const Entity &) = default;
};

// A (head, relation, tail) triple between two entities of one document.
struct RelationFact {
  int head = 0;
  int tail = 0;
  int relation = 0;

  friend auto operator<=>(const RelationFact &, const RelationFact &) = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::vector<int>> sentences;
  std::vector<Entity> entities;
  std::set<RelationFact> gold_facts;

  int num_entities() const { return static_cast<int>(entities.size()); }
  // m(m-1) ordered candidate pairs.
  int num_pairs() const { return num_entities() * (num_entities() - 1); }
  int num_tokens() const;
  int num_mentions() const;

  // Throws ParseError if any structural invariant is violated. Facts must
  // use relation ids below `num_relations`.
  void Validate(int num_relations) const;

  friend bool operator==(const Document &, const Document &) = default;
};

// A set of documents sharing one relation and entity-type vocabulary.
struct Corpus {
  int num_relations = 0;
  int num_types = 0;
  std::vector<std::string> relation_names;
  std::vector<std::string> type_names;
  std::vector<Document> docs;

  friend bool operator==(const Corpus &, const Corpus &) = default;
};

// Document flattened into one token sequence with a start marker before
// and an end marker after every mention.
struct MarkedDocument {
  std::vector<int> tokens;
  // mention_starts[e][j] is the position of the start marker of mention j
  // of entity e.
  std::vector<std::vector<int>> mention_starts;
  // Sentence index for every marked token.
  std::vector<int> token_sentence;
  // Position in the unmarked flat sequence, or -1 for marker tokens.
  std::vector<int> source_position;
  const Document *source = nullptr;

  int size() const { return static_cast<int>(tokens.size()); }
};

MarkedDocument InsertMarkers(const Document &doc);

// Removes marker tokens; the inverse of InsertMarkers on the token level.
std::vector<int> StripMarkers(const MarkedDocument &marked);

// Flat, unmarked token sequence of a document.
std::vector<int> FlattenTokens(const Document &doc);

// Bidirectional string <-> id map. When frozen, unknown keys are rejected.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::string> names, bool frozen = true);

  // Returns the id of `name`, adding it if the map is not frozen. Returns
  // -1 for unknown names in a frozen map.
  int Lookup(std::string_view name);
  int Find(std::string_view name) const;

  const std::vector<std::string> &names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }
  bool frozen() const { return frozen_; }
  void set_frozen(bool frozen) { frozen_ = frozen; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  bool frozen_ = false;
};

// Word vocabulary with the reserved marker ids pre-assigned.
class Vocabulary {
 public:
  Vocabulary();
  int Lookup(std::string_view word);
  int size() const { return words_.size(); }
  const std::vector<std::string> &words() const { return words_.names(); }
  static Vocabulary FromWords(const std::vector<std::string> &words);

 private:
  IdMap words_;
};

// Parses one DocRED record (title, sents, vertexSet, optional labels).
Document ParseDocred(const nlohmann::json &record, Vocabulary &vocab,
                     IdMap &relations, IdMap &types);
Document ParseDocred(std::string_view text, Vocabulary &vocab,
                     IdMap &relations, IdMap &types);

// Parses a DocRED split (a JSON array of records).
std::vector<Document> ParseDocredSplit(const nlohmann::json &records,
                                       Vocabulary &vocab, IdMap &relations,
                                       IdMap &types);

// Corpus file: one JSON header line, then one document per line.
inline constexpr std::string_view kCorpusFormat = "pairre-corpus";
inline constexpr int kCorpusVersion = 1;

nlohmann::json DocumentToJson(const Document &doc);
Document DocumentFromJson(const nlohmann::json &j);
void WriteCorpus(const Corpus &corpus, std::ostream &out);
Corpus ReadCorpus(std::istream &in);
void SaveCorpus(const Corpus &corpus, const std::string &path);
Corpus LoadCorpus(const std::string &path);

struct SynthConfig {
  int num_docs = 64;
  int vocab_size = 256;
  int num_relations = 4;
  int entities_per_doc = 4;
  int mentions_per_entity = 1;
  std::uint64_t seed = 7;
  int num_types = 3;
  int sentences_per_doc = 3;
  int max_facts_per_doc = 3;
  // Probability that each of the max_facts_per_doc fact slots is planted.
  double fact_rate = 1.0;
  // Copies of the trigger token planted on each side of a mention.
  int trigger_length = 4;
  // Bounds on the filler tokens placed between sentence items.
  int min_filler = 3;
  int max_filler = 4;
};

// Token ids carrying the planted signal for `relation`. A planted fact
// (h, r, t) puts the head-side trigger next to a mention of h and the
// tail-side trigger next to a mention of t.
int HeadTriggerToken(int relation);
int TailTriggerToken(int relation);

// Generates a planted-relation corpus. Deterministic in the config.
Corpus SynthCorpus(const SynthConfig &cfg);

void from_json(const nlohmann::json &j, SynthConfig &cfg);
void to_json(nlohmann::json &j, const SynthConfig &cfg);

}  // namespace pairre

#endif  // PAIRRE_CORPUS_H_
