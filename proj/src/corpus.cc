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

#include "pairre/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

#include "pairre/error.h"

namespace pairre {

using nlohmann::json;

int Document::num_tokens() const {
  int n = 0;
  for (const auto &s : sentences) n += static_cast<int>(s.size());
  return n;
}

int Document::num_mentions() const {
  int n = 0;
  for (const auto &e : entities) n += static_cast<int>(e.mentions.size());
  return n;
}

void Document::Validate(int num_relations) const {
  auto fail = [this](const std::string &msg) {
    throw ParseError("document '" + doc_id + "': " + msg);
  };
  for (int e = 0; e < num_entities(); ++e) {
    const Entity &entity = entities[e];
    if (entity.entity_id != e) {
      fail("entity at index " + std::to_string(e) + " carries id " +
           std::to_string(entity.entity_id));
    }
    if (entity.mentions.empty()) {
      fail("entity " + std::to_string(e) + " has no mentions");
    }
    for (size_t j = 0; j < entity.mentions.size(); ++j) {
      const Mention &m = entity.mentions[j];
      std::string where = "entity " + std::to_string(e) + " mention " +
                          std::to_string(j);
      if (m.entity_id != e) fail(where + " carries entity id " +
                                 std::to_string(m.entity_id));
      if (m.sent_index < 0 ||
          m.sent_index >= static_cast<int>(sentences.size())) {
        fail(where + " refers to missing sentence " +
             std::to_string(m.sent_index));
      }
      int len = static_cast<int>(sentences[m.sent_index].size());
      if (m.span.begin < 0 || m.span.end <= m.span.begin || m.span.end > len) {
        fail(where + " span [" + std::to_string(m.span.begin) + "," +
             std::to_string(m.span.end) + ") is outside sentence " +
             std::to_string(m.sent_index) + " of length " +
             std::to_string(len));
      }
    }
  }
  for (const RelationFact &f : gold_facts) {
    if (f.head < 0 || f.head >= num_entities() || f.tail < 0 ||
        f.tail >= num_entities()) {
      fail("fact references missing entity");
    }
    if (f.head == f.tail) fail("fact with head == tail");
    if (f.relation < 0 || f.relation >= num_relations) {
      fail("fact relation " + std::to_string(f.relation) +
           " outside [0, " + std::to_string(num_relations) + ")");
    }
  }
}

MarkedDocument InsertMarkers(const Document &doc) {
  MarkedDocument marked;
  marked.source = &doc;
  marked.mention_starts.resize(doc.entities.size());
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    marked.mention_starts[e].assign(doc.entities[e].mentions.size(), -1);
  }

  struct Item {
    Span span;
    int entity;
    int index;
  };
  std::vector<std::vector<Item>> by_sentence(doc.sentences.size());
  for (const Entity &entity : doc.entities) {
    for (size_t j = 0; j < entity.mentions.size(); ++j) {
      const Mention &m = entity.mentions[j];
      by_sentence[m.sent_index].push_back(
          {m.span, entity.entity_id, static_cast<int>(j)});
    }
  }

  int flat = 0;
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    std::vector<Item> &items = by_sentence[s];
    // Opening order: start ascending, end descending, then identity.
    std::sort(items.begin(), items.end(), [](const Item &a, const Item &b) {
      return std::make_tuple(a.span.begin, -a.span.end, a.entity, a.index) <
             std::make_tuple(b.span.begin, -b.span.end, b.entity, b.index);
    });
    const auto &sent = doc.sentences[s];
    const int len = static_cast<int>(sent.size());
    for (int p = 0; p <= len; ++p) {
      // Close in reverse opening order so nested markers stay balanced.
      for (auto it = items.rbegin(); it != items.rend(); ++it) {
        if (it->span.end == p) {
          marked.tokens.push_back(kMarkerEndToken);
          marked.token_sentence.push_back(static_cast<int>(s));
          marked.source_position.push_back(-1);
        }
      }
      for (const Item &item : items) {
        if (item.span.begin == p) {
          marked.mention_starts[item.entity][item.index] = marked.size();
          marked.tokens.push_back(kMarkerStartToken);
          marked.token_sentence.push_back(static_cast<int>(s));
          marked.source_position.push_back(-1);
        }
      }
      if (p < len) {
        marked.tokens.push_back(sent[p]);
        marked.token_sentence.push_back(static_cast<int>(s));
        marked.source_position.push_back(flat++);
      }
    }
  }
  return marked;
}

std::vector<int> StripMarkers(const MarkedDocument &marked) {
  std::vector<int> tokens;
  for (int i = 0; i < marked.size(); ++i) {
    if (marked.source_position[i] >= 0) tokens.push_back(marked.tokens[i]);
  }
  return tokens;
}

std::vector<int> FlattenTokens(const Document &doc) {
  std::vector<int> tokens;
  for (const auto &s : doc.sentences) tokens.insert(tokens.end(), s.begin(), s.end());
  return tokens;
}

IdMap::IdMap(std::vector<std::string> names, bool frozen) : frozen_(frozen) {
  for (auto &name : names) {
    if (ids_.count(name)) continue;
    ids_.emplace(name, static_cast<int>(names_.size()));
    names_.push_back(std::move(name));
  }
}

int IdMap::Find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  return it == ids_.end() ? -1 : it->second;
}

int IdMap::Lookup(std::string_view name) {
  int id = Find(name);
  if (id >= 0 || frozen_) return id;
  id = static_cast<int>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

Vocabulary::Vocabulary() : words_({"[UNK]", "[E]", "[/E]"}, false) {}

int Vocabulary::Lookup(std::string_view word) {
  int id = words_.Lookup(word);
  return id < 0 ? kUnknownToken : id;
}

Vocabulary Vocabulary::FromWords(const std::vector<std::string> &words) {
  Vocabulary vocab;
  for (const auto &w : words) vocab.Lookup(w);
  return vocab;
}

Document ParseDocred(const json &record, Vocabulary &vocab, IdMap &relations,
                     IdMap &types) {
  if (!record.is_object() || !record.contains("title") ||
      !record.contains("sents") || !record.contains("vertexSet")) {
    throw ParseError("DocRED record needs title, sents and vertexSet");
  }
  Document doc;
  try {
    doc.doc_id = record.at("title").get<std::string>();
    for (const auto &sent : record.at("sents")) {
      std::vector<int> ids;
      for (const auto &word : sent) ids.push_back(vocab.Lookup(word.get<std::string>()));
      doc.sentences.push_back(std::move(ids));
    }
    int e = 0;
    for (const auto &vertex : record.at("vertexSet")) {
      Entity entity;
      entity.entity_id = e;
      int j = 0;
      for (const auto &m : vertex) {
        Mention mention;
        mention.entity_id = e;
        mention.sent_index = m.at("sent_id").get<int>();
        mention.span = {m.at("pos").at(0).get<int>(), m.at("pos").at(1).get<int>()};
        std::string name = m.value("name", "");
        if (mention.sent_index < 0 ||
            mention.sent_index >= static_cast<int>(doc.sentences.size()) ||
            mention.span.begin < 0 || mention.span.end <= mention.span.begin ||
            mention.span.end >
                static_cast<int>(doc.sentences[mention.sent_index].size())) {
          throw ParseError("document '" + doc.doc_id + "': entity " +
                           std::to_string(e) + " mention " + std::to_string(j) +
                           " ('" + name + "') has span [" +
                           std::to_string(mention.span.begin) + "," +
                           std::to_string(mention.span.end) +
                           ") outside sentence " +
                           std::to_string(mention.sent_index));
        }
        if (j == 0) {
          int type = types.Lookup(m.value("type", "UNK"));
          if (type < 0) {
            throw ParseError("document '" + doc.doc_id + "': unknown entity type '" +
                             m.value("type", "UNK") + "'");
          }
          entity.entity_type = type;
        }
        if (std::find(entity.names.begin(), entity.names.end(), name) ==
            entity.names.end()) {
          entity.names.push_back(name);
        }
        entity.mentions.push_back(mention);
        ++j;
      }
      std::sort(entity.names.begin(), entity.names.end());
      doc.entities.push_back(std::move(entity));
      ++e;
    }
    if (record.contains("labels")) {
      for (const auto &label : record.at("labels")) {
        RelationFact fact;
        fact.head = label.at("h").get<int>();
        fact.tail = label.at("t").get<int>();
        const json &r = label.at("r");
        if (r.is_string()) {
          fact.relation = relations.Lookup(r.get<std::string>());
          if (fact.relation < 0) {
            throw ParseError("document '" + doc.doc_id +
                             "': unknown relation '" + r.get<std::string>() + "'");
          }
        } else {
          fact.relation = r.get<int>();
          if (fact.relation < 0 || fact.relation >= relations.size()) {
            throw ParseError("document '" + doc.doc_id + "': relation id " +
                             std::to_string(fact.relation) + " out of range");
          }
        }
        doc.gold_facts.insert(fact);
      }
    }
  } catch (const json::exception &ex) {
    throw ParseError("malformed DocRED record: " + std::string(ex.what()));
  }
  doc.Validate(relations.size());
  return doc;
}

Document ParseDocred(std::string_view text, Vocabulary &vocab,
                     IdMap &relations, IdMap &types) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::exception &ex) {
    throw ParseError("invalid JSON: " + std::string(ex.what()));
  }
  return ParseDocred(record, vocab, relations, types);
}

std::vector<Document> ParseDocredSplit(const json &records, Vocabulary &vocab,
                                       IdMap &relations, IdMap &types) {
  if (!records.is_array()) throw ParseError("DocRED split must be a JSON array");
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (const auto &record : records) {
    docs.push_back(ParseDocred(record, vocab, relations, types));
  }
  return docs;
}

json DocumentToJson(const Document &doc) {
  json entities = json::array();
  for (const Entity &e : doc.entities) {
    json mentions = json::array();
    for (const Mention &m : e.mentions) {
      mentions.push_back({m.sent_index, m.span.begin, m.span.end});
    }
    entities.push_back({{"type", e.entity_type}, {"names", e.names},
                        {"mentions", std::move(mentions)}});
  }
  json facts = json::array();
  for (const RelationFact &f : doc.gold_facts) {
    facts.push_back({f.head, f.tail, f.relation});
  }
  return {{"doc_id", doc.doc_id},
          {"sents", doc.sentences},
          {"entities", std::move(entities)},
          {"facts", std::move(facts)}};
}

Document DocumentFromJson(const json &j) {
  Document doc;
  try {
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.sentences = j.at("sents").get<std::vector<std::vector<int>>>();
    int e = 0;
    for (const auto &je : j.at("entities")) {
      Entity entity;
      entity.entity_id = e;
      entity.entity_type = je.at("type").get<int>();
      entity.names = je.at("names").get<std::vector<std::string>>();
      for (const auto &jm : je.at("mentions")) {
        entity.mentions.push_back(
            {jm.at(0).get<int>(), {jm.at(1).get<int>(), jm.at(2).get<int>()}, e});
      }
      doc.entities.push_back(std::move(entity));
      ++e;
    }
    for (const auto &jf : j.at("facts")) {
      doc.gold_facts.insert(
          {jf.at(0).get<int>(), jf.at(1).get<int>(), jf.at(2).get<int>()});
    }
  } catch (const json::exception &ex) {
    throw ParseError("malformed corpus document: " + std::string(ex.what()));
  }
  return doc;
}

void WriteCorpus(const Corpus &corpus, std::ostream &out) {
  json header = {{"format", kCorpusFormat},
                 {"version", kCorpusVersion},
                 {"num_relations", corpus.num_relations},
                 {"num_types", corpus.num_types},
                 {"relation_names", corpus.relation_names},
                 {"type_names", corpus.type_names},
                 {"num_docs", corpus.docs.size()}};
  out << header.dump() << '\n';
  for (const Document &doc : corpus.docs) out << DocumentToJson(doc).dump() << '\n';
}

Corpus ReadCorpus(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty corpus file");
  Corpus corpus;
  size_t expected = 0;
  try {
    json header = json::parse(line);
    if (header.value("format", "") != kCorpusFormat) {
      throw ParseError("not a corpus file (bad format tag)");
    }
    if (header.at("version").get<int>() != kCorpusVersion) {
      throw ParseError("unsupported corpus version " +
                       header.at("version").dump());
    }
    corpus.num_relations = header.at("num_relations").get<int>();
    corpus.num_types = header.at("num_types").get<int>();
    corpus.relation_names = header.at("relation_names").get<std::vector<std::string>>();
    corpus.type_names = header.at("type_names").get<std::vector<std::string>>();
    expected = header.at("num_docs").get<size_t>();
  } catch (const json::exception &ex) {
    throw ParseError("malformed corpus header: " + std::string(ex.what()));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &ex) {
      throw ParseError("malformed corpus line " +
                       std::to_string(corpus.docs.size() + 2) + ": " + ex.what());
    }
    Document doc = DocumentFromJson(j);
    doc.Validate(corpus.num_relations);
    for (const Entity &e : doc.entities) {
      if (e.entity_type < 0 || e.entity_type >= corpus.num_types) {
        throw ParseError("document '" + doc.doc_id + "': entity type " +
                         std::to_string(e.entity_type) + " out of range");
      }
    }
    corpus.docs.push_back(std::move(doc));
  }
  if (corpus.docs.size() != expected) {
    throw ParseError("corpus header announces " + std::to_string(expected) +
                     " documents, found " + std::to_string(corpus.docs.size()));
  }
  return corpus;
}

void SaveCorpus(const Corpus &corpus, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  WriteCorpus(corpus, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

Corpus LoadCorpus(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus '" + path + "'");
  return ReadCorpus(in);
}

int HeadTriggerToken(int relation) { return kFirstWordToken + 2 * relation; }
int TailTriggerToken(int relation) { return kFirstWordToken + 2 * relation + 1; }

namespace {

struct SynthMention {
  int entity;
  int sentence;
  int before = -1;  // trigger token repeated just before the span
  int after = -1;   // trigger token repeated just after the span
};

// True if every (a, r, b) implied by the planted triggers is a gold fact.
bool Unambiguous(const std::set<RelationFact> &facts, int num_entities,
                 int num_relations) {
  std::vector<std::vector<bool>> head(num_entities,
                                      std::vector<bool>(num_relations, false));
  auto tail = head;
  for (const RelationFact &f : facts) {
    head[f.head][f.relation] = true;
    tail[f.tail][f.relation] = true;
  }
  for (int a = 0; a < num_entities; ++a) {
    for (int b = 0; b < num_entities; ++b) {
      if (a == b) continue;
      for (int r = 0; r < num_relations; ++r) {
        if (head[a][r] && tail[b][r] && !facts.count({a, b, r})) return false;
      }
    }
  }
  return true;
}

}  // namespace

Corpus SynthCorpus(const SynthConfig &cfg) {
  if (cfg.entities_per_doc < 2) {
    throw ConfigError("synthetic corpus needs entities_per_doc >= 2");
  }
  if (cfg.num_docs < 0 || cfg.num_relations < 1 || cfg.mentions_per_entity < 1 ||
      cfg.num_types < 1 || cfg.sentences_per_doc < 1 || cfg.max_facts_per_doc < 0 ||
      cfg.min_filler < 1 || cfg.trigger_length < 1 || cfg.max_filler < cfg.min_filler || cfg.fact_rate < 0.0 || cfg.fact_rate > 1.0) {
    throw ConfigError("invalid synthetic corpus configuration");
  }
  const int first_filler = kFirstWordToken + 2 * cfg.num_relations;
  if (cfg.vocab_size < first_filler + cfg.entities_per_doc + 4) {
    throw ConfigError("vocab_size " + std::to_string(cfg.vocab_size) +
                      " too small: trigger tokens need ids below " +
                      std::to_string(first_filler));
  }

  std::mt19937_64 rng(cfg.seed);
  auto uniform = [&rng](int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  std::bernoulli_distribution plant(cfg.fact_rate);

  Corpus corpus;
  corpus.num_relations = cfg.num_relations;
  corpus.num_types = cfg.num_types;
  for (int r = 0; r < cfg.num_relations; ++r) corpus.relation_names.push_back("R" + std::to_string(r));
  for (int t = 0; t < cfg.num_types; ++t) corpus.type_names.push_back("T" + std::to_string(t));

  const int m = cfg.entities_per_doc;
  for (int d = 0; d < cfg.num_docs; ++d) {
    Document doc;
    doc.doc_id = "synth-" + std::to_string(cfg.seed) + "-" + std::to_string(d);

    // Distinct name token per entity.
    std::vector<int> names;
    while (static_cast<int>(names.size()) < m) {
      int tok = uniform(first_filler, cfg.vocab_size - 1);
      if (std::find(names.begin(), names.end(), tok) == names.end()) names.push_back(tok);
    }

    std::vector<std::vector<SynthMention>> mentions(m);
    for (int e = 0; e < m; ++e) {
      for (int j = 0; j < cfg.mentions_per_entity; ++j) {
        mentions[e].push_back({e, uniform(0, cfg.sentences_per_doc - 1)});
      }
    }

    for (int slot = 0; slot < cfg.max_facts_per_doc; ++slot) {
      if (!plant(rng)) continue;
      for (int attempt = 0; attempt < 32; ++attempt) {
        int h = uniform(0, m - 1);
        int t = uniform(0, m - 2);
        if (t >= h) ++t;
        int r = uniform(0, cfg.num_relations - 1);
        RelationFact fact{h, t, r};
        if (doc.gold_facts.count(fact)) continue;
        auto with_fact = doc.gold_facts;
        with_fact.insert(fact);
        if (!Unambiguous(with_fact, m, cfg.num_relations)) continue;

        // Each mention holds at most one trigger on each side.
        auto free_slot = [&](int e) -> std::pair<int, bool> {
          std::vector<std::pair<int, bool>> options;
          for (int j = 0; j < cfg.mentions_per_entity; ++j) {
            if (mentions[e][j].after < 0) options.push_back({j, true});
            else if (mentions[e][j].before < 0) options.push_back({j, false});
          }
          if (options.empty()) return {-1, false};
          return options[uniform(0, static_cast<int>(options.size()) - 1)];
        };
        auto [hj, h_after] = free_slot(h);
        auto [tj, t_after] = free_slot(t);
        if (hj < 0 || tj < 0) continue;
        (h_after ? mentions[h][hj].after : mentions[h][hj].before) = HeadTriggerToken(r);
        (t_after ? mentions[t][tj].after : mentions[t][tj].before) = TailTriggerToken(r);
        doc.gold_facts = std::move(with_fact);
        break;
      }
    }

    // Lay out sentences: filler, then mentions with their triggers, in a
    // random order, separated by min_filler to max_filler filler tokens.
    auto filler = [&]() {
      for (;;) {
        int tok = uniform(first_filler, cfg.vocab_size - 1);
        if (std::find(names.begin(), names.end(), tok) == names.end()) return tok;
      }
    };
    doc.entities.resize(m);
    for (int e = 0; e < m; ++e) {
      doc.entities[e].entity_id = e;
      doc.entities[e].entity_type = uniform(0, cfg.num_types - 1);
      doc.entities[e].names = {std::to_string(e)};
      doc.entities[e].mentions.resize(cfg.mentions_per_entity);
    }
    for (int s = 0; s < cfg.sentences_per_doc; ++s) {
      std::vector<std::pair<int, int>> items;
      for (int e = 0; e < m; ++e) {
        for (int j = 0; j < cfg.mentions_per_entity; ++j) {
          if (mentions[e][j].sentence == s) items.push_back({e, j});
        }
      }
      std::shuffle(items.begin(), items.end(), rng);
      std::vector<int> tokens;
      for (auto [e, j] : items) {
        int count = uniform(cfg.min_filler, cfg.max_filler);
        for (int f = 0; f < count; ++f) tokens.push_back(filler());
        const SynthMention &sm = mentions[e][j];
        if (sm.before >= 0) tokens.insert(tokens.end(), cfg.trigger_length, sm.before);
        int begin = static_cast<int>(tokens.size());
        tokens.push_back(names[e]);
        doc.entities[e].mentions[j] = {s, {begin, begin + 1}, e};
        if (sm.after >= 0) tokens.insert(tokens.end(), cfg.trigger_length, sm.after);
      }
      int count = uniform(cfg.min_filler, cfg.max_filler);
      for (int f = 0; f < count; ++f) tokens.push_back(filler());
      doc.sentences.push_back(std::move(tokens));
    }
    doc.Validate(cfg.num_relations);
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

void from_json(const json &j, SynthConfig &cfg) {
  cfg.num_docs = j.value("num_docs", cfg.num_docs);
  cfg.vocab_size = j.value("vocab_size", cfg.vocab_size);
  cfg.num_relations = j.value("num_relations", cfg.num_relations);
  cfg.entities_per_doc = j.value("entities_per_doc", cfg.entities_per_doc);
  cfg.mentions_per_entity = j.value("mentions_per_entity", cfg.mentions_per_entity);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.num_types = j.value("num_types", cfg.num_types);
  cfg.sentences_per_doc = j.value("sentences_per_doc", cfg.sentences_per_doc);
  cfg.max_facts_per_doc = j.value("max_facts_per_doc", cfg.max_facts_per_doc);
  cfg.fact_rate = j.value("fact_rate", cfg.fact_rate);
  cfg.trigger_length = j.value("trigger_length", cfg.trigger_length);
  cfg.min_filler = j.value("min_filler", cfg.min_filler);
  cfg.max_filler = j.value("max_filler", cfg.max_filler);
}

void to_json(json &j, const SynthConfig &cfg) {
  j = {{"num_docs", cfg.num_docs},
       {"vocab_size", cfg.vocab_size},
       {"num_relations", cfg.num_relations},
       {"entities_per_doc", cfg.entities_per_doc},
       {"mentions_per_entity", cfg.mentions_per_entity},
       {"seed", cfg.seed},
       {"num_types", cfg.num_types},
       {"sentences_per_doc", cfg.sentences_per_doc},
       {"max_facts_per_doc", cfg.max_facts_per_doc},
       {"fact_rate", cfg.fact_rate},
       {"trigger_length", cfg.trigger_length},
       {"min_filler", cfg.min_filler},
       {"max_filler", cfg.max_filler}};
}

}  // namespace pairre
