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

#include "edrm/word_ranker.h"

#include <cmath>

namespace edrm {

WordRanker::WordRanker(const ModelConfig &config, const ParamStore &store)
    : config_(config), store_(&store) {
  config_.Validate();
}

std::vector<TermSequence> WordRanker::Grams(std::span<const WordId> words,
                                            size_t max_len) const {
  const size_t dim = config_.encoder.dim;
  const Tensor &table = store_->Get(params::kWordEmbedding).value;
  size_t n = std::min(words.size(), max_len);
  std::vector<double> rows(n * dim);
  for (size_t i = 0; i < n; ++i) {
    WordId w = words[i] < config_.encoder.word_vocab ? words[i] : 0;
    auto src = table.row(w);
    std::copy(src.begin(), src.end(), rows.begin() + i * dim);
  }
  TermSequence unigrams =
      MakeTermSequence(TermSide::Words(1), dim, std::move(rows));
  if (config_.mode == ModelMode::kKnrm) return {unigrams};
  std::vector<TermSequence> grams;
  for (int h = 1; h <= config_.max_ngram; ++h) {
    grams.push_back(
        ComposeNgrams(unigrams, h,
                      store_->Get(params::NgramWeight(h)).value.values(),
                      store_->Get(params::NgramBias(h)).value.values(), dim));
  }
  return grams;
}

std::vector<double> WordRanker::Features(std::span<const WordId> query,
                                         std::span<const WordId> doc) const {
  std::vector<TermSequence> q = Grams(query, config_.max_query_words);
  std::vector<TermSequence> d = Grams(doc, config_.max_doc_words);
  std::vector<double> phi;
  for (const TermSequence &qg : q) {
    for (const TermSequence &dg : d) {
      BlockKind kind{qg.side, dg.side};
      std::vector<double> f =
          KernelPool(BuildTranslationMatrix(qg, dg, kind), config_.kernels);
      phi.insert(phi.end(), f.begin(), f.end());
    }
  }
  return phi;
}

double WordRanker::Score(std::span<const WordId> query,
                         std::span<const WordId> doc) const {
  std::vector<double> phi = Features(query, doc);
  auto w = store_->Get(params::kRankWeight).value.values();
  if (w.size() != phi.size()) {
    throw Error("ranking layer has " + std::to_string(w.size()) +
                " weights for " + std::to_string(phi.size()) + " features");
  }
  double sum = 0.0;
  for (size_t f = 0; f < phi.size(); ++f) sum += w[f] * phi[f];
  return std::tanh(sum + store_->Get(params::kRankBias).value.values()[0]);
}

}  // namespace edrm
