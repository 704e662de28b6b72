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

#include "edrm/knowledge_store.h"

#include <functional>

#include "doctest.h"
#include "edrm/io.h"
#include "test_util.h"

namespace edrm {
namespace {

using testing::TempDir;
using testing::ToyKg;

// All non-overlapping segmentations of words into skipped tokens and
// surface-form mentions of at most max_len tokens. Each is encoded as its
// choice sequence: 0 to skip a token, otherwise the mention length. The
// lexicographically largest sequence prefers, at the first point where two
// segmentations differ, a mention over a skip and a longer mention over a
// shorter one.
std::vector<Mention> OracleAnnotate(const TokenSeq &words,
                                    const KnowledgeGraph &kg, size_t max_len) {
  std::vector<size_t> best_choices;
  std::vector<Mention> best;
  std::vector<size_t> choices;
  std::vector<Mention> current;
  std::function<void(size_t)> walk = [&](size_t pos) {
    if (pos == words.size()) {
      if (best_choices.empty() || choices > best_choices) {
        best_choices = choices;
        best = current;
      }
      return;
    }
    choices.push_back(0);
    walk(pos + 1);
    choices.pop_back();
    for (size_t len = 1; len <= max_len && pos + len <= words.size(); ++len) {
      TokenSeq span(words.begin() + pos, words.begin() + pos + len);
      const auto &forms = kg.surface_forms().forms();
      auto it = forms.find(span);
      if (it == forms.end()) continue;
      // Highest commonness, then lowest entity id.
      const Candidate *top = &it->second[0];
      for (const Candidate &c : it->second) {
        if (c.commonness > top->commonness ||
            (c.commonness == top->commonness && c.entity < top->entity)) {
          top = &c;
        }
      }
      choices.push_back(len);
      current.push_back({top->entity, static_cast<uint32_t>(pos),
                         static_cast<uint32_t>(pos + len)});
      walk(pos + len);
      current.pop_back();
      choices.pop_back();
    }
  };
  walk(0);
  return best;
}

void WriteToyFiles(const TempDir &dir, const std::string &entities,
                   const std::string &forms) {
  WriteFileAtomic(dir.File("entities.tsv"), entities);
  WriteFileAtomic(dir.File("forms.tsv"), forms);
}

TEST_CASE("three entity file loads with ids 0..2") {
  TempDir dir("kg_load");
  WriteToyFiles(dir,
                "0\t1 2\t5 6 7\t0,1\n"
                "1\t3\t\t\n"
                "2\t4\t8\t2\n",
                "1 2\t0\t1.0\n3\t1\t0.5\n3\t2\t0.5\n");
  KnowledgeGraph kg =
      LoadKnowledgeGraph(dir.File("entities.tsv"), dir.File("forms.tsv"));
  REQUIRE(kg.num_entities() == 3);
  for (EntityId id = 0; id < 3; ++id) CHECK(kg.entity(id).id == id);
  CHECK(kg.entity(0).types == std::vector<TypeId>{0, 1});
  CHECK(kg.entity(1).description.empty());
  CHECK(kg.entity(1).types.empty());
  // Equal commonness: ascending entity id first.
  const auto *cands = kg.surface_forms().Find(TokenSeq{3});
  REQUIRE(cands != nullptr);
  CHECK((*cands)[0].entity == 1);
  CHECK((*cands)[1].entity == 2);
}

TEST_CASE("undefined type id names the entity") {
  TempDir dir("kg_type");
  WriteToyFiles(dir, "0\t1\t\t0\n1\t2\t\t7\n", "1\t0\t1\n");
  try {
    LoadKnowledgeGraph(dir.File("entities.tsv"), dir.File("forms.tsv"),
                       {10, 4});
    FAIL("expected a validation error");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("entity 1") != std::string::npos);
  }
}

TEST_CASE("malformed lines report their line number") {
  TempDir dir("kg_parse");
  WriteToyFiles(dir, "0\t1\t\t0\n1\t2\tx\t0\n", "1\t0\t1\n");
  try {
    LoadKnowledgeGraph(dir.File("entities.tsv"), dir.File("forms.tsv"));
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("invalid knowledge graphs are rejected") {
  TempDir dir("kg_invalid");
  SUBCASE("non contiguous ids") {
    WriteToyFiles(dir, "0\t1\t\t\n2\t2\t\t\n", "");
  }
  SUBCASE("duplicate type") {
    WriteToyFiles(dir, "0\t1\t\t1,1\n", "");
  }
  SUBCASE("dangling description word") {
    WriteToyFiles(dir, "0\t1\t99\t\n", "");
  }
  SUBCASE("commonness mass above one") {
    WriteToyFiles(dir, "0\t1\t\t\n1\t2\t\t\n", "1\t0\t0.7\n1\t1\t0.4\n");
  }
  SUBCASE("surface form to unknown entity") {
    WriteToyFiles(dir, "0\t1\t\t\n", "1\t5\t1\n");
  }
  CHECK_THROWS_AS(LoadKnowledgeGraph(dir.File("entities.tsv"),
                                     dir.File("forms.tsv"), {20, 4}),
                  ValidationError);
}

KnowledgeGraph RandomKg(size_t entities, uint64_t seed) {
  Rng rng = NamedStream(seed, "test/kg");
  std::vector<Entity> list;
  SurfaceFormTable forms;
  for (size_t i = 0; i < entities; ++i) {
    Entity e;
    e.id = static_cast<EntityId>(i);
    e.name = {static_cast<WordId>(UniformInt(rng, 500)),
              static_cast<WordId>(UniformInt(rng, 500))};
    for (size_t k = UniformInt(rng, 6); k > 0; --k) {
      e.description.push_back(static_cast<WordId>(UniformInt(rng, 500)));
    }
    for (TypeId t = 0; t < 10; ++t) {
      if (UniformInt(rng, 4) == 0) e.types.push_back(t);
    }
    list.push_back(e);
  }
  for (size_t i = 0; i < entities; ++i) {
    TokenSeq mention = {static_cast<WordId>(UniformInt(rng, 500))};
    if (UniformInt(rng, 2)) mention.push_back(static_cast<WordId>(UniformInt(rng, 500)));
    if (forms.Find(mention) != nullptr) continue;
    double c = UniformReal(rng, 0.05, 0.5);
    forms.Add(mention, static_cast<EntityId>(i), c);
    forms.Add(mention, static_cast<EntityId>((i + 1) % entities), 1.0 - c - 0.01);
  }
  forms.Finalize();
  return KnowledgeGraph(std::move(list), std::move(forms), {500, 10});
}

TEST_CASE("1000 entity graph round trips bit identically") {
  TempDir dir("kg_round");
  KnowledgeGraph kg = RandomKg(1000, 5);
  SaveKnowledgeGraph(kg, dir.File("e1"), dir.File("s1"));
  KnowledgeGraph back =
      LoadKnowledgeGraph(dir.File("e1"), dir.File("s1"), {500, 10});
  SaveKnowledgeGraph(back, dir.File("e2"), dir.File("s2"));
  CHECK(ReadFile(dir.File("e1")) == ReadFile(dir.File("e2")));
  CHECK(ReadFile(dir.File("s1")) == ReadFile(dir.File("s2")));
  REQUIRE(back.num_entities() == kg.num_entities());
  for (EntityId id = 0; id < kg.num_entities(); ++id) {
    CHECK(back.entity(id) == kg.entity(id));
  }
  for (const auto &[mention, cands] : kg.surface_forms().forms()) {
    const auto *got = back.surface_forms().Find(mention);
    REQUIRE(got != nullptr);
    CHECK(*got == cands);
  }
}

TEST_CASE("annotate basics") {
  KnowledgeGraph kg = ToyKg();
  CHECK(Annotate(TokenSeq{20, 21, 22}, kg, 4).empty());
  CHECK(Annotate(TokenSeq{}, kg, 4).empty());
  // "apple" alone links to its most common sense.
  auto m = Annotate(TokenSeq{9, 1, 9}, kg, 4);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == Mention{0, 1, 2});
  // Longest match wins over the shorter prefix.
  m = Annotate(TokenSeq{1, 2, 3}, kg, 4);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == Mention{0, 0, 2});
  CHECK(m[1] == Mention{2, 2, 3});
  // With one-token mentions only, "apple inc" splits.
  m = Annotate(TokenSeq{1, 2}, kg, 1);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == Mention{0, 0, 1});
}

TEST_CASE("argmax commonness candidate is linked") {
  SurfaceFormTable forms;
  forms.Add({7}, 1, 0.2);
  forms.Add({7}, 0, 0.8);
  forms.Finalize();
  KnowledgeGraph kg({{0, {7}, {}, {}}, {1, {8}, {}, {}}}, forms, {10, 1});
  auto m = Annotate(TokenSeq{7}, kg, 3);
  REQUIRE(m.size() == 1);
  CHECK(m[0].entity == 0);
}

TEST_CASE("annotate matches the exhaustive segmentation oracle") {
  KnowledgeGraph kg = RandomKg(200, 9);
  // Dense word range so that mentions actually occur.
  Rng rng = NamedStream(9, "test/sentences");
  std::vector<TokenSeq> forms;
  for (const auto &[mention, cands] : kg.surface_forms().forms()) {
    forms.push_back(mention);
  }
  size_t linked = 0;
  for (int s = 0; s < 50; ++s) {
    TokenSeq words;
    size_t len = 1 + UniformInt(rng, 14);
    while (words.size() < len) {
      if (UniformInt(rng, 2)) {
        const TokenSeq &f = forms[UniformInt(rng, forms.size())];
        words.insert(words.end(), f.begin(), f.end());
      } else {
        words.push_back(static_cast<WordId>(UniformInt(rng, 500)));
      }
    }
    for (size_t max_len : {1, 2, 4}) {
      auto got = Annotate(words, kg, max_len);
      CHECK(got == OracleAnnotate(words, kg, max_len));
      linked += got.size();
    }
  }
  CHECK(linked > 50);
}

TEST_CASE("annotate properties over random sequences") {
  KnowledgeGraph kg = RandomKg(300, 13);
  Rng rng = NamedStream(13, "test/props");
  for (int s = 0; s < 300; ++s) {
    TokenSeq words(UniformInt(rng, 30));
    for (WordId &w : words) w = static_cast<WordId>(UniformInt(rng, 60));
    size_t max_len = 1 + UniformInt(rng, 3);
    auto m = Annotate(words, kg, max_len);
    CHECK(m == Annotate(words, kg, max_len));
    uint32_t end = 0;
    for (const Mention &x : m) {
      CHECK(x.start >= end);
      CHECK(x.end > x.start);
      CHECK(x.end - x.start <= max_len);
      end = x.end;
      const auto *cands =
          kg.surface_forms().Find(std::span(words).subspan(x.start, x.end - x.start));
      REQUIRE(cands != nullptr);
      for (const Candidate &c : *cands) {
        double linked = 0.0;
        for (const Candidate &d : *cands) {
          if (d.entity == x.entity) linked = d.commonness;
        }
        CHECK(c.commonness <= linked);
      }
    }
    CHECK(end <= words.size());
  }
}

TEST_CASE("duet text validation") {
  CHECK_NOTHROW(ValidateDuetText(testing::Text({1, 2, 3}, {{0, 0, 1}, {1, 1, 3}})));
  CHECK_THROWS_AS(ValidateDuetText(testing::Text({1, 2}, {{0, 1, 3}})),
                  ValidationError);
  CHECK_THROWS_AS(ValidateDuetText(testing::Text({1, 2, 3}, {{0, 0, 2}, {1, 1, 3}})),
                  ValidationError);
  CHECK_THROWS_AS(ValidateDuetText(testing::Text({1, 2, 3}, {{0, 2, 3}, {1, 0, 1}})),
                  ValidationError);
}

}  // namespace
}  // namespace edrm
