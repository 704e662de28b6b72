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

// Term sequences, n-gram composition and cosine translation matrices
// between the query and document sides of the word-entity duet.

#ifndef EDRM_INTERACTION_H_
#define EDRM_INTERACTION_H_

#include <span>
#include <string>
#include <vector>

#include "edrm/common.h"

namespace edrm {

// One side of a match: word h-grams (ngram >= 1) or entities.
struct TermSide {
  bool entity = false;
  int ngram = 1;

  static TermSide Words(int h) { return {false, h}; }
  static TermSide Entities() { return {true, 0}; }

  std::string Label() const;  // "w2", "e"
  bool operator==(const TermSide &) const = default;
};

// The kind of a translation matrix: which query-side terms are matched
// against which document-side terms.
struct BlockKind {
  TermSide query;
  TermSide doc;

  std::string Label() const;  // "w1-w2", "e-w1", "w3-e", "e-e"
  bool WordOnly() const { return !query.entity && !doc.entity; }
  // word-word and entity-entity blocks; the rest are cross-space.
  bool InSpace() const { return query.entity == doc.entity; }
  bool operator==(const BlockKind &) const = default;
};

// Canonical feature layout. Word-pair blocks in (h_q, h_d) order, then
// entity x doc h-gram by h_d, then query h-gram x entity by h_q, then
// entity x entity. max_ngram is 1 for K-NRM. Without the entity channel
// only the word-pair blocks remain.
std::vector<BlockKind> BuildLayout(int max_ngram, bool entity_channel);

// Term vectors of one side. Rows with mask 0 are padding and never match.
struct TermSequence {
  TermSide side;
  size_t dim = 0;
  std::vector<double> vectors;  // size() x dim
  std::vector<uint8_t> mask;

  size_t size() const { return mask.size(); }
  std::span<const double> row(size_t i) const {
    return std::span<const double>(vectors).subspan(i * dim, dim);
  }
};

TermSequence MakeTermSequence(TermSide side, size_t dim,
                              std::vector<double> vectors);

// g_i = ReLU(W [v_i; ...; v_{i+h-1}] + b) for i in [0, n - h]. W is
// (out x h*dim). Sequences shorter than h give an empty sequence.
// pre_activation, when given, receives the (n-h+1) x out values before
// the ReLU.
TermSequence ComposeNgrams(const TermSequence &words, int h,
                           std::span<const double> weight,
                           std::span<const double> bias, size_t out_dim,
                           std::vector<double> *pre_activation = nullptr);

// Adds gradients of ComposeNgrams into d_words (n x dim), d_weight and
// d_bias given d_out ((n-h+1) x out).
void ComposeNgramsBackward(const TermSequence &words, int h,
                           std::span<const double> weight, size_t out_dim,
                           std::span<const double> pre_activation,
                           std::span<const double> d_out,
                           std::span<double> d_words,
                           std::span<double> d_weight,
                           std::span<double> d_bias);

// Cosine similarities between query rows and document columns. Cells
// involving a masked or zero-norm vector are invalid and hold 0.
struct TranslationMatrix {
  BlockKind kind;
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> scores;
  std::vector<uint8_t> valid;

  double at(size_t i, size_t j) const { return scores[i * cols + j]; }
  bool is_valid(size_t i, size_t j) const { return valid[i * cols + j] != 0; }
};

TranslationMatrix BuildTranslationMatrix(const TermSequence &query,
                                         const TermSequence &doc,
                                         BlockKind kind);

// Adds d(cos)/d(vectors) into d_query (rows x dim) and d_doc (cols x dim).
void TranslationMatrixBackward(const TranslationMatrix &matrix,
                               const TermSequence &query,
                               const TermSequence &doc,
                               std::span<const double> d_scores,
                               std::span<double> d_query,
                               std::span<double> d_doc);

// Encoded side of a duet: word h-gram sequences indexed by h - 1 and the
// entity sequence.
struct DuetTerms {
  std::vector<TermSequence> grams;
  TermSequence entities;

  const TermSequence &Get(TermSide side) const;
};

// One translation matrix per layout block, in layout order.
std::vector<TranslationMatrix> DuetMatrices(const DuetTerms &query,
                                            const DuetTerms &doc,
                                            const std::vector<BlockKind> &layout);

// kind,row,col,valid,score lines for offline inspection.
std::string MatricesCsv(const std::vector<TranslationMatrix> &matrices);

}  // namespace edrm

#endif  // EDRM_INTERACTION_H_
