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

// Queries, documents, click logs and the labels derived from them.
//
// File formats (tab separated, '\n' line endings):
//   texts:  id \t word_ids [\t entity_id:start:end,...]
//   clicks: query_id \t doc_id \t impressions \t clicks
//   split:  query_id \t train|test \t stratum_tag

#ifndef EDRM_CORPUS_H_
#define EDRM_CORPUS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edrm/knowledge_store.h"

namespace edrm {

struct ClickRecord {
  QueryId query = 0;
  DocId doc = 0;
  uint64_t impressions = 0;
  uint64_t clicks = 0;
};

struct LabeledPair {
  QueryId query = 0;
  DocId doc = 0;
  double grade = 0.0;

  bool operator==(const LabeledPair &) const = default;
};

// Texts referenced by id. Immutable once loaded.
struct CorpusStore {
  std::map<QueryId, DuetText> queries;
  std::map<DocId, DuetText> docs;

  const DuetText &query(QueryId id) const;
  const DuetText &doc(DocId id) const;
};

// A training triple. Text pointers refer into a CorpusStore which must
// outlive the instance.
struct PairwiseInstance {
  QueryId query = 0;
  DocId positive = 0;
  DocId negative = 0;
  const DuetText *query_text = nullptr;
  const DuetText *positive_text = nullptr;
  const DuetText *negative_text = nullptr;
};

// grade = sum(clicks) / sum(impressions) per (query, doc), ordered by
// (query, doc). Throws ValidationError on impressions == 0 or
// clicks > impressions.
std::vector<LabeledPair> DctrLabels(const std::vector<ClickRecord> &records);

struct PairStats {
  size_t pairs = 0;
  // Queries with fewer than two labeled documents.
  size_t skipped_queries = 0;
};

// Every ordered (pos, neg) pair within a query whose grades strictly differ,
// ordered by (query, pos doc, neg doc). max_pairs_per_query == 0 means no
// cap; a cap keeps the first pairs in that order.
std::vector<PairwiseInstance> MakePairs(const std::vector<LabeledPair> &labels,
                                        const CorpusStore &texts,
                                        size_t max_pairs_per_query = 0,
                                        PairStats *stats = nullptr);

enum class SplitRole { kTrain, kTest };

struct SplitEntry {
  QueryId query = 0;
  SplitRole role = SplitRole::kTrain;
  std::string stratum;

  bool operator==(const SplitEntry &) const = default;
};

// Parses one texts file. With a knowledge graph and no inline annotations,
// entities are linked with Annotate().
std::map<uint32_t, DuetText> LoadTexts(const std::string &path,
                                       const KnowledgeGraph *kg = nullptr,
                                       size_t max_mention_len = 4);
std::string SerializeTexts(const std::map<uint32_t, DuetText> &texts,
                           bool with_entities);

std::vector<ClickRecord> LoadClicks(const std::string &path);
std::string SerializeClicks(const std::vector<ClickRecord> &records);

std::vector<SplitEntry> LoadSplit(const std::string &path);
std::string SerializeSplit(const std::vector<SplitEntry> &split);

}  // namespace edrm

#endif  // EDRM_CORPUS_H_
