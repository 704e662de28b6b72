// Copyright 2026 The EDRM Authors.
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

#include "edrm/synthetic.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "edrm/io.h"
#include "edrm/rng.h"

namespace edrm {

void SyntheticSpec::Validate() const {
  if (queries < 20) throw ValidationError("synthetic corpus needs >= 20 queries");
  if (docs_per_query < 5) {
    throw ValidationError("synthetic corpus needs >= 5 docs per query");
  }
  if (types < 2) throw ValidationError("synthetic corpus needs >= 2 types");
  if (!(mix_a >= 0 && mix_b >= 0 && mix_c >= 0) || !(mix_a + mix_b + mix_c > 0)) {
    throw ValidationError("stratum weights must be non-negative, not all 0");
  }
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test fraction must be in [0, 1)");
  }
  if (background_entities < 1 || filler_words < 10 || description_words < 10 ||
      bridge_words < 10 || name_words < 10) {
    throw ValidationError("synthetic vocabulary pools are too small");
  }
}

std::string SyntheticSpec::ToString() const {
  return "queries=" + std::to_string(queries) +
         ",docs_per_query=" + std::to_string(docs_per_query) +
         ",types=" + std::to_string(types) + ",mix=a:" + FormatDouble(mix_a) +
         "/b:" + FormatDouble(mix_b) + "/c:" + FormatDouble(mix_c) +
         ",test_fraction=" + FormatDouble(test_fraction) +
         ",background_entities=" + std::to_string(background_entities) +
         ",filler_words=" + std::to_string(filler_words) +
         ",description_words=" + std::to_string(description_words) +
         ",bridge_words=" + std::to_string(bridge_words) +
         ",name_words=" + std::to_string(name_words);
}

void ParseMix(const std::string &text, SyntheticSpec *spec) {
  spec->mix_a = spec->mix_b = spec->mix_c = 0.0;
  for (std::string_view item : Split(text, ',')) {
    auto kv = Split(item, '=');
    double w;
    if (kv.size() != 2 || !ParseDouble(kv[1], &w)) {
      throw ValidationError("bad stratum weight '" + std::string(item) + "'");
    }
    if (kv[0] == "a") {
      spec->mix_a = w;
    } else if (kv[0] == "b") {
      spec->mix_b = w;
    } else if (kv[0] == "c") {
      spec->mix_c = w;
    } else {
      throw ValidationError("unknown stratum '" + std::string(kv[0]) + "'");
    }
  }
}

std::vector<WordId> FrequentWords(const CorpusStore &corpus, size_t n) {
  std::map<WordId, size_t> counts;
  for (const auto &[id, t] : corpus.queries) {
    for (WordId w : t.words) ++counts[w];
  }
  for (const auto &[id, t] : corpus.docs) {
    for (WordId w : t.words) ++counts[w];
  }
  std::vector<std::pair<size_t, WordId>> order;
  for (const auto &[w, c] : counts) order.emplace_back(c, w);
  std::sort(order.begin(), order.end(), [](const auto &a, const auto &b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<WordId> out;
  for (size_t i = 0; i < std::min(n, order.size()); ++i) {
    out.push_back(order[i].second);
  }
  return out;
}

namespace {

// Word ids are laid out as: UNK, stopwords, filler, description words, one
// word per type, topic words, bridge words, name words, then fresh words handed out on
// demand.
class Generator {
 public:
  Generator(uint64_t seed, const SyntheticSpec &spec, size_t topic_words)
      : seed_(seed), spec_(spec) {
    next_word_ = 1;
    stop_begin_ = Take(kStopwords);
    filler_begin_ = Take(spec.filler_words);
    desc_begin_ = Take(spec.description_words);
    type_word_begin_ = Take(spec.types);
    topic_begin_ = Take(topic_words);
    topic_count_ = topic_words;
    bridge_begin_ = Take(spec.bridge_words);
    name_begin_ = Take(spec.name_words);
  }

  Rng Stream(const std::string &name) const {
    return NamedStream(seed_, "generate/" + name);
  }

  WordId FreshWord() { return next_word_++; }

  WordId TopicWord(size_t i) const {
    return static_cast<WordId>(topic_begin_ + i);
  }
  size_t topic_count() const { return topic_count_; }

  // k distinct bridge words, none of them in avoid.
  TokenSeq BridgeWords(Rng &rng, size_t k, const TokenSeq &avoid) {
    TokenSeq pool;
    for (size_t i = 0; i < spec_.bridge_words; ++i) {
      WordId w = static_cast<WordId>(bridge_begin_ + i);
      if (std::find(avoid.begin(), avoid.end(), w) == avoid.end()) pool.push_back(w);
    }
    Shuffle(pool, rng);
    pool.resize(k);
    return pool;
  }

  // One type, and a second distinct one with probability 0.3, drawn from
  // allowed (ascending, non-empty).
  std::vector<TypeId> DrawTypes(Rng &rng, const std::vector<TypeId> &allowed) {
    std::vector<TypeId> pool = allowed;
    Shuffle(pool, rng);
    size_t n = pool.size() >= 2 && UniformReal(rng, 0.0, 1.0) < 0.3 ? 2 : 1;
    std::vector<TypeId> types(pool.begin(), pool.begin() + n);
    std::sort(types.begin(), types.end());
    return types;
  }

  std::vector<TypeId> AllTypes() const {
    std::vector<TypeId> all(spec_.types);
    for (size_t t = 0; t < all.size(); ++t) all[t] = static_cast<TypeId>(t);
    return all;
  }

  // A description of 4-6 tokens: the given words, one word per type, then
  // shared description words, shuffled.
  TokenSeq Description(Rng &rng, const std::vector<TypeId> &types,
                       const TokenSeq &extra) {
    size_t length = 4 + UniformInt(rng, 3);
    TokenSeq desc = extra;
    for (TypeId t : types) desc.push_back(static_cast<WordId>(type_word_begin_ + t));
    while (desc.size() < length) {
      desc.push_back(
          static_cast<WordId>(desc_begin_ + UniformInt(rng, spec_.description_words)));
    }
    Shuffle(desc, rng);
    return desc;
  }

  // A new entity named by an unused pair of name words, neither of them in
  // avoid.
  EntityId NewEntity(Rng &rng, std::vector<TypeId> types, TokenSeq description,
                     const TokenSeq &avoid = {}) {
    Entity e;
    e.id = static_cast<EntityId>(entities_.size());
    auto usable = [&](WordId w) {
      return std::find(avoid.begin(), avoid.end(), w) == avoid.end();
    };
    do {
      e.name.clear();
      while (e.name.size() < 2) {
        WordId w = static_cast<WordId>(name_begin_ + UniformInt(rng, spec_.name_words));
        if (usable(w) && (e.name.empty() || e.name[0] != w)) e.name.push_back(w);
      }
    } while (!names_.insert(e.name).second);
    e.description = std::move(description);
    e.types = std::move(types);
    forms_.Add(e.name, e.id, 1.0);
    entities_.push_back(std::move(e));
    return entities_.back().id;
  }

  // Ambiguous alias shared by two entities; never used in texts.
  void AddAlias(EntityId major, EntityId minor) {
    TokenSeq alias = {FreshWord()};
    forms_.Add(alias, major, 0.7);
    forms_.Add(alias, minor, 0.3);
  }

  // Stopwords, filler and content in random order, with the entity's name
  // inserted as one span when given.
  DuetText Document(Rng &rng, const TokenSeq &content, const EntityId *entity) {
    TokenSeq words = content;
    size_t stops = 4 + UniformInt(rng, 3);
    for (size_t i = 0; i < stops; ++i) {
      words.push_back(static_cast<WordId>(stop_begin_ + UniformInt(rng, kStopwords)));
    }
    size_t fill = 3 + UniformInt(rng, 4);
    for (size_t i = 0; i < fill; ++i) {
      words.push_back(
          static_cast<WordId>(filler_begin_ + UniformInt(rng, spec_.filler_words)));
    }
    Shuffle(words, rng);
    DuetText text;
    if (entity == nullptr) {
      text.words = std::move(words);
      return text;
    }
    const TokenSeq &name = entities_[*entity].name;
    size_t at = UniformInt(rng, words.size() + 1);
    text.words.assign(words.begin(), words.begin() + at);
    text.words.insert(text.words.end(), name.begin(), name.end());
    text.words.insert(text.words.end(), words.begin() + at, words.end());
    text.entities.push_back({*entity, static_cast<uint32_t>(at),
                             static_cast<uint32_t>(at + name.size())});
    return text;
  }

  DuetText EntityQuery(EntityId entity) const {
    DuetText text;
    text.words = entities_[entity].name;
    text.entities.push_back(
        {entity, 0, static_cast<uint32_t>(text.words.size())});
    return text;
  }

  const Entity &entity(EntityId id) const { return entities_[id]; }

  KnowledgeGraph Finish() {
    forms_.Finalize();
    return KnowledgeGraph(entities_, forms_,
                          {next_word_, static_cast<uint32_t>(spec_.types)});
  }

  uint32_t word_vocab() const { return next_word_; }
  size_t entity_count() const { return entities_.size(); }

 private:
  size_t Take(size_t n) {
    size_t begin = next_word_;
    next_word_ += static_cast<uint32_t>(n);
    return begin;
  }

  uint64_t seed_;
  SyntheticSpec spec_;
  uint32_t next_word_ = 0;
  size_t stop_begin_ = 0;
  size_t filler_begin_ = 0;
  size_t desc_begin_ = 0;
  size_t type_word_begin_ = 0;
  size_t topic_begin_ = 0;
  size_t topic_count_ = 0;
  size_t bridge_begin_ = 0;
  size_t name_begin_ = 0;
  std::set<TokenSeq> names_;
  std::vector<Entity> entities_;
  SurfaceFormTable forms_;
};

// Per-stratum counts by largest remainder; ties favour the earlier stratum.
std::vector<size_t> StratumCounts(const SyntheticSpec &spec) {
  double w[3] = {spec.mix_a, spec.mix_b, spec.mix_c};
  double total = w[0] + w[1] + w[2];
  std::vector<size_t> counts(3);
  std::vector<std::pair<double, size_t>> rest;
  size_t assigned = 0;
  for (size_t s = 0; s < 3; ++s) {
    double exact = static_cast<double>(spec.queries) * w[s] / total;
    counts[s] = static_cast<size_t>(std::floor(exact));
    assigned += counts[s];
    rest.emplace_back(exact - std::floor(exact), s);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [](const auto &a, const auto &b) { return a.first > b.first; });
  for (size_t i = 0; assigned < spec.queries; ++i, ++assigned) {
    ++counts[rest[i % 3].second];
  }
  return counts;
}

struct PlantedDoc {
  DuetText text;
  int grade = 0;
};

}  // namespace

Dataset GenerateSynthetic(uint64_t seed, const SyntheticSpec &spec) {
  spec.Validate();
  std::vector<size_t> counts = StratumCounts(spec);
  Generator gen(seed, spec, std::max<size_t>(40, 3 * counts[0]));

  std::vector<char> strata;
  for (size_t s = 0; s < 3; ++s) strata.insert(strata.end(), counts[s], "abc"[s]);
  {
    Rng rng = gen.Stream("strata");
    Shuffle(strata, rng);
  }

  std::vector<EntityId> background;
  {
    Rng rng = gen.Stream("background");
    for (size_t i = 0; i < spec.background_entities; ++i) {
      std::vector<TypeId> types = gen.DrawTypes(rng, gen.AllTypes());
      TokenSeq desc = gen.Description(rng, types, {});
      background.push_back(gen.NewEntity(rng, types, desc));
    }
    for (size_t i = 0; i + 1 < background.size(); i += 10) {
      gen.AddAlias(background[i], background[i + 1]);
    }
  }

  Dataset d;
  std::vector<ClickRecord> clicks;
  DocId next_doc = 0;
  for (QueryId q = 0; q < strata.size(); ++q) {
    Rng rng = gen.Stream("query/" + std::to_string(q));
    std::vector<PlantedDoc> docs;
    DuetText query;
    const size_t n = spec.docs_per_query;

    if (strata[q] == 'a') {
      std::vector<WordId> topics(gen.topic_count());
      for (size_t i = 0; i < topics.size(); ++i) topics[i] = gen.TopicWord(i);
      Shuffle(topics, rng);
      size_t qlen = 2 + UniformInt(rng, 2);
      query.words.assign(topics.begin(), topics.begin() + qlen);
      // Distractors are topic words of no relevance to this query.
      auto distractor = [&]() {
        return topics[qlen + UniformInt(rng, topics.size() - qlen)];
      };
      for (size_t i = 0; i < n; ++i) {
        TokenSeq content;
        int grade = 0;
        if (i == 0) {
          content = query.words;
          grade = 2;
        } else if (i <= 2) {
          content = {query.words[i - 1]};
          grade = 1;
        }
        size_t extra = (grade == 2 ? 0 : 1) + UniformInt(rng, 2);
        for (size_t k = 0; k < extra; ++k) content.push_back(distractor());
        EntityId e = background[UniformInt(rng, background.size())];
        docs.push_back({gen.Document(rng, content, &e), grade});
      }
    } else if (strata[q] == 'b') {
      std::vector<TypeId> all = gen.AllTypes();
      std::vector<TypeId> qtypes = gen.DrawTypes(rng, all);
      EntityId qe = gen.NewEntity(rng, qtypes, gen.Description(rng, qtypes, {}));
      query = gen.EntityQuery(qe);
      std::vector<TypeId> others;
      for (TypeId t : all) {
        if (!std::binary_search(qtypes.begin(), qtypes.end(), t)) others.push_back(t);
      }
      // The relevant entity keeps one query type and may add a type the
      // query entity lacks.
      std::vector<TypeId> rtypes = {qtypes[UniformInt(rng, qtypes.size())]};
      if (!others.empty() && UniformReal(rng, 0.0, 1.0) < 0.3) {
        rtypes.push_back(others[UniformInt(rng, others.size())]);
        std::sort(rtypes.begin(), rtypes.end());
      }
      for (size_t i = 0; i < n; ++i) {
        std::vector<TypeId> types = i == 0 ? rtypes : gen.DrawTypes(rng, others);
        EntityId e = gen.NewEntity(rng, types, gen.Description(rng, types, {}),
                                   query.words);
        docs.push_back({gen.Document(rng, {}, &e), i == 0 ? 2 : 0});
      }
    } else {
      query.words = gen.BridgeWords(rng, 1 + UniformInt(rng, 2), {});
      // Negative descriptions carry a bridge word too, just not the query's.
      for (size_t i = 0; i < n; ++i) {
        std::vector<TypeId> types = gen.DrawTypes(rng, gen.AllTypes());
        TokenSeq desc = gen.Description(
            rng, types, i == 0 ? query.words : gen.BridgeWords(rng, 1, query.words));
        EntityId e = gen.NewEntity(rng, types, desc);
        docs.push_back({gen.Document(rng, {}, &e), i == 0 ? 2 : 0});
      }
    }

    // Ids are handed out in shuffled order so that score ties, broken by
    // ascending doc id, do not favour the planted document.
    Shuffle(docs, rng);
    d.corpus.queries[q] = std::move(query);
    for (PlantedDoc &doc : docs) {
      DocId id = next_doc++;
      d.corpus.docs[id] = std::move(doc.text);
      clicks.push_back({q, id, kImpressions, kClicksByGrade[doc.grade]});
    }
  }

  d.kg = gen.Finish();
  d.clicks = std::move(clicks);

  Rng rng = gen.Stream("split");
  for (char s : std::string("abc")) {
    std::vector<QueryId> ids;
    for (QueryId q = 0; q < strata.size(); ++q) {
      if (strata[q] == s) ids.push_back(q);
    }
    Shuffle(ids, rng);
    size_t test = static_cast<size_t>(
        std::llround(static_cast<double>(ids.size()) * spec.test_fraction));
    if (ids.size() >= 2 && spec.test_fraction > 0.0) {
      test = std::clamp<size_t>(test, 1, ids.size() - 1);
    }
    for (size_t i = 0; i < ids.size(); ++i) {
      d.split.push_back({ids[i], i < test ? SplitRole::kTest : SplitRole::kTrain,
                         std::string(1, s)});
    }
  }
  std::sort(d.split.begin(), d.split.end(),
            [](const SplitEntry &a, const SplitEntry &b) { return a.query < b.query; });

  d.meta["generator"] = "synthetic";
  d.meta["seed"] = std::to_string(seed);
  d.meta["spec"] = spec.ToString();
  d.meta["word_vocab"] = std::to_string(gen.word_vocab());
  d.meta["entity_vocab"] = std::to_string(gen.entity_count());
  d.meta["type_vocab"] = std::to_string(spec.types);
  d.meta["queries_a"] = std::to_string(counts[0]);
  d.meta["queries_b"] = std::to_string(counts[1]);
  d.meta["queries_c"] = std::to_string(counts[2]);
  return d;
}

}  // namespace edrm
