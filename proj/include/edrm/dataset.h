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

// A dataset directory: knowledge graph, texts, clicks, split and qrels.
//
//   meta.txt           key=value vocabulary sizes and provenance
//   entities.tsv       id \t name ids \t description ids \t type ids
//   surface_forms.tsv  mention ids \t entity id \t commonness
//   queries.tsv        id \t word ids [\t entity:start:end,...]
//   docs.tsv           same as queries.tsv
//   clicks.tsv         query \t doc \t impressions \t clicks
//   split.tsv          query \t train|test \t stratum
//   qrels.tsv          query \t doc \t grade (DCTR)

#ifndef EDRM_DATASET_H_
#define EDRM_DATASET_H_

#include <map>
#include <string>
#include <vector>

#include "edrm/corpus.h"

namespace edrm {

struct Dataset {
  // Free-form key=value pairs. word_vocab, entity_vocab and type_vocab are
  // read back as vocabulary sizes.
  std::map<std::string, std::string> meta;
  KnowledgeGraph kg;
  CorpusStore corpus;
  std::vector<ClickRecord> clicks;
  std::vector<SplitEntry> split;

  uint32_t word_vocab() const;
  uint32_t entity_vocab() const;
  uint32_t type_vocab() const;

  std::vector<QueryId> Queries(SplitRole role,
                               const std::string &stratum = "") const;
  std::string StratumOf(QueryId query) const;
};

inline constexpr const char *kDatasetFiles[] = {
    "meta.txt",   "entities.tsv", "surface_forms.tsv", "queries.tsv",
    "docs.tsv",   "clicks.tsv",   "split.tsv",         "qrels.tsv"};

// Texts without inline annotations are linked against the knowledge graph.
Dataset LoadDataset(const std::string &dir);
// Writes every file of kDatasetFiles; returns their paths.
std::vector<std::string> SaveDataset(const Dataset &dataset,
                                     const std::string &dir);

std::string SerializeMeta(const std::map<std::string, std::string> &meta);
std::map<std::string, std::string> ParseMeta(const std::string &path);

// Longest mention the annotator will try.
inline constexpr size_t kMaxMentionLength = 8;

}  // namespace edrm

#endif  // EDRM_DATASET_H_
