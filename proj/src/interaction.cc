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

#include "edrm/interaction.h"

#include <sstream>

#include "edrm/io.h"
#include "linalg.h"

namespace edrm {

std::string TermSide::Label() const {
  return entity ? "e" : "w" + std::to_string(ngram);
}

std::string BlockKind::Label() const {
  return query.Label() + "-" + doc.Label();
}

std::vector<BlockKind> BuildLayout(int max_ngram, bool entity_channel) {
  std::vector<BlockKind> layout;
  for (int hq = 1; hq <= max_ngram; ++hq) {
    for (int hd = 1; hd <= max_ngram; ++hd) {
      layout.push_back({TermSide::Words(hq), TermSide::Words(hd)});
    }
  }
  if (entity_channel) {
    for (int hd = 1; hd <= max_ngram; ++hd) {
      layout.push_back({TermSide::Entities(), TermSide::Words(hd)});
    }
    for (int hq = 1; hq <= max_ngram; ++hq) {
      layout.push_back({TermSide::Words(hq), TermSide::Entities()});
    }
    layout.push_back({TermSide::Entities(), TermSide::Entities()});
  }
  return layout;
}

TermSequence MakeTermSequence(TermSide side, size_t dim,
                              std::vector<double> vectors) {
  TermSequence seq;
  seq.side = side;
  seq.dim = dim;
  size_t n = dim == 0 ? 0 : vectors.size() / dim;
  seq.vectors = std::move(vectors);
  seq.mask.assign(n, 1);
  return seq;
}

TermSequence ComposeNgrams(const TermSequence &words, int h,
                           std::span<const double> weight,
                           std::span<const double> bias, size_t out_dim,
                           std::vector<double> *pre_activation) {
  TermSequence out;
  out.side = TermSide::Words(h);
  out.dim = out_dim;
  size_t n = words.size();
  size_t window = static_cast<size_t>(h);
  size_t in = window * words.dim;
  size_t count = n >= window ? n - window + 1 : 0;
  out.vectors.assign(count * out_dim, 0.0);
  out.mask.assign(count, 0);
  if (pre_activation != nullptr) pre_activation->assign(count * out_dim, 0.0);
  for (size_t i = 0; i < count; ++i) {
    auto x = std::span<const double>(words.vectors).subspan(i * words.dim, in);
    auto y = std::span<double>(out.vectors).subspan(i * out_dim, out_dim);
    linalg::MatVec(weight, out_dim, in, x, y);
    bool real = true;
    for (size_t t = 0; t < window; ++t) real = real && words.mask[i + t];
    for (size_t r = 0; r < out_dim; ++r) {
      y[r] += bias[r];
      if (pre_activation != nullptr) (*pre_activation)[i * out_dim + r] = y[r];
      if (y[r] < 0.0) y[r] = 0.0;
    }
    out.mask[i] = real ? 1 : 0;
  }
  return out;
}

void ComposeNgramsBackward(const TermSequence &words, int h,
                           std::span<const double> weight, size_t out_dim,
                           std::span<const double> pre_activation,
                           std::span<const double> d_out,
                           std::span<double> d_words,
                           std::span<double> d_weight,
                           std::span<double> d_bias) {
  size_t window = static_cast<size_t>(h);
  size_t in = window * words.dim;
  size_t count = words.size() >= window ? words.size() - window + 1 : 0;
  std::vector<double> dz(out_dim);
  for (size_t i = 0; i < count; ++i) {
    bool any = false;
    for (size_t r = 0; r < out_dim; ++r) {
      // ReLU'(0) = 0.
      dz[r] = pre_activation[i * out_dim + r] > 0.0 ? d_out[i * out_dim + r]
                                                     : 0.0;
      any = any || dz[r] != 0.0;
    }
    if (!any) continue;
    auto x = std::span<const double>(words.vectors).subspan(i * words.dim, in);
    linalg::OuterAcc(dz, x, d_weight);
    linalg::Axpy(1.0, dz, d_bias);
    linalg::MatTVecAcc(weight, out_dim, in, dz,
                       d_words.subspan(i * words.dim, in));
  }
}

namespace {

std::vector<double> RowNorms(const TermSequence &seq) {
  std::vector<double> norms(seq.size());
  for (size_t i = 0; i < seq.size(); ++i) {
    norms[i] = seq.mask[i] ? linalg::Norm(seq.row(i)) : 0.0;
  }
  return norms;
}

}  // namespace

TranslationMatrix BuildTranslationMatrix(const TermSequence &query,
                                         const TermSequence &doc,
                                         BlockKind kind) {
  if (query.size() > 0 && doc.size() > 0 && query.dim != doc.dim) {
    throw Error("translation matrix " + kind.Label() +
                ": embedding dimensions differ");
  }
  TranslationMatrix m;
  m.kind = kind;
  m.rows = query.size();
  m.cols = doc.size();
  m.scores.assign(m.rows * m.cols, 0.0);
  m.valid.assign(m.rows * m.cols, 0);
  std::vector<double> qn = RowNorms(query);
  std::vector<double> dn = RowNorms(doc);
  for (size_t i = 0; i < m.rows; ++i) {
    if (qn[i] == 0.0) continue;
    for (size_t j = 0; j < m.cols; ++j) {
      if (dn[j] == 0.0) continue;
      m.scores[i * m.cols + j] =
          linalg::Dot(query.row(i), doc.row(j)) / (qn[i] * dn[j]);
      m.valid[i * m.cols + j] = 1;
    }
  }
  return m;
}

void TranslationMatrixBackward(const TranslationMatrix &matrix,
                               const TermSequence &query,
                               const TermSequence &doc,
                               std::span<const double> d_scores,
                               std::span<double> d_query,
                               std::span<double> d_doc) {
  std::vector<double> qn = RowNorms(query);
  std::vector<double> dn = RowNorms(doc);
  size_t dim = query.dim;
  for (size_t i = 0; i < matrix.rows; ++i) {
    for (size_t j = 0; j < matrix.cols; ++j) {
      size_t cell = i * matrix.cols + j;
      double g = d_scores[cell];
      if (!matrix.valid[cell] || g == 0.0) continue;
      double cos = matrix.scores[cell];
      double inv = 1.0 / (qn[i] * dn[j]);
      auto q = query.row(i);
      auto d = doc.row(j);
      auto dq = d_query.subspan(i * dim, dim);
      auto dd = d_doc.subspan(j * dim, dim);
      double q_scale = cos / (qn[i] * qn[i]);
      double d_scale = cos / (dn[j] * dn[j]);
      for (size_t k = 0; k < dim; ++k) {
        dq[k] += g * (d[k] * inv - q_scale * q[k]);
        dd[k] += g * (q[k] * inv - d_scale * d[k]);
      }
    }
  }
}

const TermSequence &DuetTerms::Get(TermSide side) const {
  if (side.entity) return entities;
  return grams.at(static_cast<size_t>(side.ngram - 1));
}

std::vector<TranslationMatrix> DuetMatrices(
    const DuetTerms &query, const DuetTerms &doc,
    const std::vector<BlockKind> &layout) {
  std::vector<TranslationMatrix> matrices;
  matrices.reserve(layout.size());
  for (const BlockKind &kind : layout) {
    matrices.push_back(
        BuildTranslationMatrix(query.Get(kind.query), doc.Get(kind.doc), kind));
  }
  return matrices;
}

std::string MatricesCsv(const std::vector<TranslationMatrix> &matrices) {
  std::string out = "kind,row,col,valid,score\n";
  for (const TranslationMatrix &m : matrices) {
    std::string label = m.kind.Label();
    for (size_t i = 0; i < m.rows; ++i) {
      for (size_t j = 0; j < m.cols; ++j) {
        out += label + "," + std::to_string(i) + "," + std::to_string(j) + "," +
               (m.is_valid(i, j) ? "1," : "0,") + FormatDouble(m.at(i, j)) +
               "\n";
      }
    }
  }
  return out;
}

}  // namespace edrm
