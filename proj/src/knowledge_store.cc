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

#include <algorithm>
#include <unordered_set>

#include "edrm/io.h"

namespace edrm {

void ValidateDuetText(const DuetText &text) {
  uint32_t previous_end = 0;
  for (const Mention &m : text.entities) {
    if (m.start >= m.end || m.end > text.words.size()) {
      throw ValidationError("entity " + std::to_string(m.entity) + " span [" +
                            std::to_string(m.start) + "," +
                            std::to_string(m.end) + ") outside text of " +
                            std::to_string(text.words.size()) + " words");
    }
    if (m.start < previous_end) {
      throw ValidationError("entity " + std::to_string(m.entity) +
                            " span overlaps or is out of order");
    }
    previous_end = m.end;
  }
}

void SurfaceFormTable::Add(TokenSeq mention, EntityId entity,
                           double commonness) {
  max_length_ = std::max(max_length_, mention.size());
  forms_[std::move(mention)].push_back({entity, commonness});
}

void SurfaceFormTable::Finalize() {
  for (auto &[mention, candidates] : forms_) {
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate &a, const Candidate &b) {
                if (a.commonness != b.commonness) {
                  return a.commonness > b.commonness;
                }
                return a.entity < b.entity;
              });
    double total = 0.0;
    std::unordered_set<EntityId> seen;
    for (const Candidate &c : candidates) {
      if (!(c.commonness >= 0.0 && c.commonness <= 1.0)) {
        throw ValidationError("mention [" + JoinIds(mention, ' ') +
                              "] entity " + std::to_string(c.entity) +
                              ": commonness outside [0,1]");
      }
      if (!seen.insert(c.entity).second) {
        throw ValidationError("mention [" + JoinIds(mention, ' ') +
                              "] lists entity " + std::to_string(c.entity) +
                              " twice");
      }
      total += c.commonness;
    }
    if (total > 1.0 + 1e-9) {
      throw ValidationError("mention [" + JoinIds(mention, ' ') +
                            "]: commonness sums to " + FormatDouble(total));
    }
  }
}

const std::vector<Candidate> *SurfaceFormTable::Find(
    std::span<const WordId> tokens) const {
  auto it = forms_.find(tokens);
  return it == forms_.end() ? nullptr : &it->second;
}

KnowledgeGraph::KnowledgeGraph(std::vector<Entity> entities,
                               SurfaceFormTable forms, KgLimits limits)
    : entities_(std::move(entities)), forms_(std::move(forms)),
      limits_(limits) {
  std::sort(entities_.begin(), entities_.end(),
            [](const Entity &a, const Entity &b) { return a.id < b.id; });
  for (size_t i = 0; i < entities_.size(); ++i) {
    if (entities_[i].id != i) {
      throw ValidationError("entity ids must be contiguous from 0; found " +
                            std::to_string(entities_[i].id) + " at position " +
                            std::to_string(i));
    }
  }

  if (limits_.word_vocab_size == 0 || limits_.type_vocab_size == 0) {
    uint32_t max_word = 0, max_type = 0;
    for (const Entity &e : entities_) {
      for (WordId w : e.name) max_word = std::max(max_word, w + 1);
      for (WordId w : e.description) max_word = std::max(max_word, w + 1);
      for (TypeId t : e.types) max_type = std::max(max_type, t + 1);
    }
    for (const auto &[mention, candidates] : forms_.forms()) {
      for (WordId w : mention) max_word = std::max(max_word, w + 1);
    }
    if (limits_.word_vocab_size == 0) limits_.word_vocab_size = max_word;
    if (limits_.type_vocab_size == 0) limits_.type_vocab_size = max_type;
  }

  for (const Entity &e : entities_) {
    auto name = "entity " + std::to_string(e.id);
    for (WordId w : e.name) {
      if (w >= limits_.word_vocab_size) {
        throw ValidationError(name + ": name word id " + std::to_string(w) +
                              " outside word vocabulary");
      }
    }
    for (WordId w : e.description) {
      if (w >= limits_.word_vocab_size) {
        throw ValidationError(name + ": description word id " +
                              std::to_string(w) + " outside word vocabulary");
      }
    }
    std::unordered_set<TypeId> seen;
    for (TypeId t : e.types) {
      if (t >= limits_.type_vocab_size) {
        throw ValidationError(name + ": undefined type id " +
                              std::to_string(t));
      }
      if (!seen.insert(t).second) {
        throw ValidationError(name + ": duplicate type id " +
                              std::to_string(t));
      }
    }
  }

  forms_.Finalize();
  for (const auto &[mention, candidates] : forms_.forms()) {
    if (mention.empty()) throw ValidationError("empty surface form");
    for (WordId w : mention) {
      if (w >= limits_.word_vocab_size) {
        throw ValidationError("mention [" + JoinIds(mention, ' ') +
                              "]: word id outside word vocabulary");
      }
    }
    for (const Candidate &c : candidates) {
      if (c.entity >= entities_.size()) {
        throw ValidationError("mention [" + JoinIds(mention, ' ') +
                              "] links to undefined entity " +
                              std::to_string(c.entity));
      }
    }
  }
}

KnowledgeGraph LoadKnowledgeGraph(const std::string &entities_path,
                                  const std::string &surface_forms_path,
                                  KgLimits limits) {
  std::vector<Entity> entities;
  ForEachLine(entities_path, [&](size_t line, std::string_view text) {
    if (text.empty()) return;
    auto fields = Split(text, '\t');
    if (fields.size() != 4) {
      throw ParseError(entities_path, line, "expected 4 tab-separated fields");
    }
    Entity e;
    uint64_t id;
    if (!ParseUint(fields[0], &id) || id > UINT32_MAX) {
      throw ParseError(entities_path, line, "bad entity id");
    }
    e.id = static_cast<EntityId>(id);
    if (!ParseIdList(fields[1], ' ', &e.name)) {
      throw ParseError(entities_path, line, "bad name tokens");
    }
    if (!ParseIdList(fields[2], ' ', &e.description)) {
      throw ParseError(entities_path, line, "bad description tokens");
    }
    if (!ParseIdList(fields[3], ',', &e.types)) {
      throw ParseError(entities_path, line, "bad type ids");
    }
    entities.push_back(std::move(e));
  });

  SurfaceFormTable forms;
  ForEachLine(surface_forms_path, [&](size_t line, std::string_view text) {
    if (text.empty()) return;
    auto fields = Split(text, '\t');
    if (fields.size() != 3) {
      throw ParseError(surface_forms_path, line,
                       "expected 3 tab-separated fields");
    }
    TokenSeq mention;
    if (!ParseIdList(fields[0], ' ', &mention) || mention.empty()) {
      throw ParseError(surface_forms_path, line, "bad mention tokens");
    }
    uint64_t entity;
    if (!ParseUint(fields[1], &entity) || entity > UINT32_MAX) {
      throw ParseError(surface_forms_path, line, "bad entity id");
    }
    double commonness;
    if (!ParseDouble(fields[2], &commonness)) {
      throw ParseError(surface_forms_path, line, "bad commonness");
    }
    forms.Add(std::move(mention), static_cast<EntityId>(entity), commonness);
  });

  return KnowledgeGraph(std::move(entities), std::move(forms), limits);
}

std::string SerializeEntities(const KnowledgeGraph &kg) {
  std::string out;
  for (const Entity &e : kg.entities()) {
    out += std::to_string(e.id);
    out += '\t';
    out += JoinIds(e.name, ' ');
    out += '\t';
    out += JoinIds(e.description, ' ');
    out += '\t';
    out += JoinIds(e.types, ',');
    out += '\n';
  }
  return out;
}

std::string SerializeSurfaceForms(const KnowledgeGraph &kg) {
  std::string out;
  for (const auto &[mention, candidates] : kg.surface_forms().forms()) {
    for (const Candidate &c : candidates) {
      out += JoinIds(mention, ' ');
      out += '\t';
      out += std::to_string(c.entity);
      out += '\t';
      out += FormatDouble(c.commonness);
      out += '\n';
    }
  }
  return out;
}

void SaveKnowledgeGraph(const KnowledgeGraph &kg,
                        const std::string &entities_path,
                        const std::string &surface_forms_path) {
  WriteFileAtomic(entities_path, SerializeEntities(kg));
  WriteFileAtomic(surface_forms_path, SerializeSurfaceForms(kg));
}

std::vector<Mention> Annotate(std::span<const WordId> words,
                              const KnowledgeGraph &kg,
                              size_t max_mention_len) {
  std::vector<Mention> mentions;
  const SurfaceFormTable &forms = kg.surface_forms();
  size_t longest = std::min(max_mention_len, forms.max_mention_length());
  size_t i = 0;
  while (i < words.size()) {
    size_t matched = 0;
    for (size_t len = std::min(longest, words.size() - i); len >= 1; --len) {
      const auto *candidates = forms.Find(words.subspan(i, len));
      if (candidates != nullptr && !candidates->empty()) {
        mentions.push_back({candidates->front().entity,
                            static_cast<uint32_t>(i),
                            static_cast<uint32_t>(i + len)});
        matched = len;
        break;
      }
    }
    i += matched > 0 ? matched : 1;
  }
  return mentions;
}

}  // namespace edrm
