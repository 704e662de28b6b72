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

// Plain K-NRM / Conv-KNRM over words only. Reads the word embedding,
// n-gram and ranking parameters of a ParamStore and nothing else.

#ifndef EDRM_WORD_RANKER_H_
#define EDRM_WORD_RANKER_H_

#include <span>
#include <vector>

#include "edrm/model.h"

namespace edrm {

class WordRanker {
 public:
  // Uses mode, max_ngram, kernels, dimension and length limits of config.
  // The store must outlive the ranker.
  WordRanker(const ModelConfig &config, const ParamStore &store);

  double Score(std::span<const WordId> query,
               std::span<const WordId> doc) const;
  std::vector<double> Features(std::span<const WordId> query,
                               std::span<const WordId> doc) const;

 private:
  std::vector<TermSequence> Grams(std::span<const WordId> words,
                                  size_t max_len) const;

  ModelConfig config_;
  const ParamStore *store_;
};

}  // namespace edrm

#endif  // EDRM_WORD_RANKER_H_
