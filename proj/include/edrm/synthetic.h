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

// Deterministic synthetic corpora with planted relevance in three strata:
//
//   a  lexical: query topic words appear in the relevant document
//   b  type overlap: the relevant document's entity shares a type with the
//      query entity, and no content word is shared
//   c  description bridge: query words occur only in the description of the
//      relevant document's entity
//
// Every b and c query gets entities of its own, so nothing learned about one
// entity transfers by memorization to another query. Bridge words come from
// a shared pool and never occur in any text.

#ifndef EDRM_SYNTHETIC_H_
#define EDRM_SYNTHETIC_H_

#include <string>

#include "edrm/dataset.h"

namespace edrm {

struct SyntheticSpec {
  size_t queries = 200;
  size_t docs_per_query = 10;
  size_t types = 8;
  // Relative stratum weights.
  double mix_a = 1.0;
  double mix_b = 1.0;
  double mix_c = 1.0;
  double test_fraction = 0.3;
  // Shared background entities mentioned in stratum a documents.
  size_t background_entities = 60;
  size_t filler_words = 400;
  size_t description_words = 120;
  // Pool of stratum c query words.
  size_t bridge_words = 40;
  // Entity names are distinct pairs of words from this pool.
  size_t name_words = 300;

  // Throws ValidationError below 20 queries, 5 docs per query or 2 types.
  void Validate() const;
  // "queries=200,docs_per_query=10,..." for manifests.
  std::string ToString() const;
};

// Parses "a=1,b=2,c=0" style weights into spec.
void ParseMix(const std::string &text, SyntheticSpec *spec);

inline constexpr size_t kStopwords = 20;
inline constexpr uint64_t kImpressions = 20000;
// Clicks per kImpressions for planted grades 0, 1, 2.
inline constexpr uint64_t kClicksByGrade[3] = {0, 6000, 14000};

Dataset GenerateSynthetic(uint64_t seed, const SyntheticSpec &spec);

// The n most frequent word ids over every query and document, ties by
// ascending id.
std::vector<WordId> FrequentWords(const CorpusStore &corpus, size_t n);

}  // namespace edrm

#endif  // EDRM_SYNTHETIC_H_
