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

// Knowledge graph storage and commonness-based entity annotation.
//
// Entities file, one record per line:
//   id \t name_tokens \t desc_tokens \t type_ids
// where token lists are space separated word ids and type ids are comma
// separated. Description and types may be empty.
//
// Surface forms file:
//   mention_tokens \t entity_id \t commonness

#ifndef EDRM_KNOWLEDGE_STORE_H_
#define EDRM_KNOWLEDGE_STORE_H_

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edrm/common.h"

namespace edrm {

struct Entity {
  EntityId id = 0;
  TokenSeq name;
  TokenSeq description;
  std::vector<TypeId> types;

  bool operator==(const Entity &) const = default;
};

struct Candidate {
  EntityId entity = 0;
  double commonness = 0.0;

  bool operator==(const Candidate &) const = default;
};

// An entity linked to the half-open token span [start, end).
struct Mention {
  EntityId entity = 0;
  uint32_t start = 0;
  uint32_t end = 0;

  bool operator==(const Mention &) const = default;
};

// A query or document as parallel bag-of-words and bag-of-entities.
struct DuetText {
  TokenSeq words;
  std::vector<Mention> entities;

  bool operator==(const DuetText &) const = default;
};

// Checks span bounds, non-overlap and span order.
void ValidateDuetText(const DuetText &text);

// Vocabulary bounds used to validate cross references. A zero size means
// "infer from the data" (max id seen + 1).
struct KgLimits {
  uint32_t word_vocab_size = 0;
  uint32_t type_vocab_size = 0;
};

// Orders token sequences and lets spans be looked up without copying.
struct TokenLess {
  using is_transparent = void;
  bool operator()(std::span<const WordId> a, std::span<const WordId> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

// Mention token sequence -> candidates, sorted by descending commonness with
// ties broken by ascending entity id.
class SurfaceFormTable {
 public:
  void Add(TokenSeq mention, EntityId entity, double commonness);

  // Sorts candidate lists and checks per-mention invariants. Must be called
  // after the last Add.
  void Finalize();

  // nullptr when the token span is not a known surface form.
  const std::vector<Candidate> *Find(std::span<const WordId> tokens) const;

  size_t max_mention_length() const { return max_length_; }
  size_t size() const { return forms_.size(); }
  const std::map<TokenSeq, std::vector<Candidate>, TokenLess> &forms() const {
    return forms_;
  }

 private:
  std::map<TokenSeq, std::vector<Candidate>, TokenLess> forms_;
  size_t max_length_ = 0;
};

// Immutable after construction; safe to share across threads.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Validates every invariant and throws ValidationError naming the
  // offending entity or mention.
  KnowledgeGraph(std::vector<Entity> entities, SurfaceFormTable forms,
                 KgLimits limits);

  size_t num_entities() const { return entities_.size(); }
  const Entity &entity(EntityId id) const { return entities_.at(id); }
  const std::vector<Entity> &entities() const { return entities_; }
  const SurfaceFormTable &surface_forms() const { return forms_; }
  const KgLimits &limits() const { return limits_; }

 private:
  std::vector<Entity> entities_;
  SurfaceFormTable forms_;
  KgLimits limits_;
};

KnowledgeGraph LoadKnowledgeGraph(const std::string &entities_path,
                                  const std::string &surface_forms_path,
                                  KgLimits limits = {});

std::string SerializeEntities(const KnowledgeGraph &kg);
std::string SerializeSurfaceForms(const KnowledgeGraph &kg);
void SaveKnowledgeGraph(const KnowledgeGraph &kg,
                        const std::string &entities_path,
                        const std::string &surface_forms_path);

// Greedy left-to-right longest match against the surface form table. Each
// match links to its top-commonness candidate. Spans never overlap and never
// exceed max_mention_len tokens.
std::vector<Mention> Annotate(std::span<const WordId> words,
                              const KnowledgeGraph &kg,
                              size_t max_mention_len);

}  // namespace edrm

#endif  // EDRM_KNOWLEDGE_STORE_H_
