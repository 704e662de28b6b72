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

#include "edrm/entity_encoder.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "linalg.h"

namespace edrm {

void EncoderConfig::Validate() const {
  if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
  if (desc_window < 1) throw ValidationError("description window must be >= 1");
  if (word_vocab < 1) throw ValidationError("word vocabulary is empty");
}

Tensor UniformTensor(std::vector<size_t> shape, double limit, Rng &rng) {
  Tensor t(std::move(shape));
  for (double &v : t.values()) v = UniformReal(rng, -limit, limit);
  return t;
}

Tensor XavierTensor(size_t out, size_t in, Rng &rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  return UniformTensor({out, in}, limit, rng);
}

void EntityEncoder::AddParams(ParamStore &store, const EncoderConfig &config,
                              EntitySwitches switches, uint64_t seed) {
  config.Validate();
  const size_t dim = config.dim;
  const double emb_limit = 0.05;
  auto stream = [seed](const char *name) {
    return NamedStream(seed, std::string("init/") + name);
  };
  {
    Rng rng = stream(params::kWordEmbedding);
    store.Add(params::kWordEmbedding,
              UniformTensor({config.word_vocab, dim}, emb_limit, rng));
  }
  {
    Rng rng = stream(params::kEntityEmbedding);
    store.Add(params::kEntityEmbedding,
              UniformTensor({config.entity_vocab, dim}, emb_limit, rng),
              switches.embed);
  }
  {
    Rng rng = stream(params::kTypeEmbedding);
    store.Add(params::kTypeEmbedding,
              UniformTensor({config.type_vocab, dim}, emb_limit, rng),
              switches.type);
  }
  {
    Rng rng = stream(params::kDescWeight);
    store.Add(params::kDescWeight,
              XavierTensor(dim, config.desc_window * dim, rng),
              switches.description);
    store.Add(params::kDescBias, Tensor({dim}), switches.description);
  }
  {
    Rng rng = stream(params::kBowWeight);
    store.Add(params::kBowWeight, XavierTensor(dim, dim, rng), switches.type);
  }
  {
    Rng rng = stream(params::kCombineWeight);
    store.Add(params::kCombineWeight, XavierTensor(dim, 2 * dim, rng),
              switches.combine());
    store.Add(params::kCombineBias, Tensor({dim}), switches.combine());
  }
}

EntityEncoder::EntityEncoder(const EncoderConfig &config,
                             EntitySwitches switches, const ParamStore &store)
    : config_(config), switches_(switches),
      word_emb_(store.Index(params::kWordEmbedding)),
      entity_emb_(store.Index(params::kEntityEmbedding)),
      type_emb_(store.Index(params::kTypeEmbedding)),
      desc_w_(store.Index(params::kDescWeight)),
      desc_b_(store.Index(params::kDescBias)),
      bow_w_(store.Index(params::kBowWeight)),
      combine_w_(store.Index(params::kCombineWeight)),
      combine_b_(store.Index(params::kCombineBias)) {
  config_.Validate();
}

std::vector<double> EntityEncoder::EmbedWords(
    const ParamStore &store, std::span<const WordId> tokens) const {
  const size_t dim = config_.dim;
  const Tensor &table = store[word_emb_].value;
  std::vector<double> rows(tokens.size() * dim);
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto src = table.row(ClampWord(tokens[i]));
    std::copy(src.begin(), src.end(), rows.begin() + i * dim);
  }
  return rows;
}

void EntityEncoder::EmbedWordsBackward(std::span<const WordId> tokens,
                                       std::span<const double> d_rows,
                                       GradBuffer &grads) const {
  const size_t dim = config_.dim;
  auto table = grads[word_emb_];
  for (size_t i = 0; i < tokens.size(); ++i) {
    size_t row = ClampWord(tokens[i]);
    linalg::Axpy(1.0, d_rows.subspan(i * dim, dim),
                 table.subspan(row * dim, dim));
  }
}

std::vector<double> EntityEncoder::BagOfWords(
    std::span<const double> rows) const {
  const size_t dim = config_.dim;
  size_t n = rows.size() / dim;
  std::vector<double> bow(dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    linalg::Axpy(1.0, rows.subspan(i * dim, dim), bow);
  }
  if (config_.bow_mean && n > 0) {
    for (double &v : bow) v /= static_cast<double>(n);
  }
  return bow;
}

std::vector<double> EntityEncoder::EncodeDescriptionRows(
    const ParamStore &store, std::span<const double> rows,
    DescriptionCache *cache) const {
  const size_t dim = config_.dim;
  const size_t h = config_.desc_window;
  const size_t in = h * dim;
  size_t m = rows.size() / dim;
  std::vector<double> out(dim, 0.0);
  DescriptionCache local;
  DescriptionCache &c = cache != nullptr ? *cache : local;
  c = DescriptionCache();
  if (m == 0) return out;

  // Zero-pad to one full window.
  std::vector<double> padded(rows.begin(), rows.end());
  if (m < h) padded.resize(h * dim, 0.0);
  size_t length = std::max(m, h);
  c.windows = length - h + 1;
  c.inputs.resize(c.windows * in);
  c.pre_activation.resize(c.windows * dim);
  c.argmax.assign(dim, 0);

  auto weight = store[desc_w_].value.values();
  auto bias = store[desc_b_].value.values();
  for (size_t w = 0; w < c.windows; ++w) {
    auto x = std::span<double>(c.inputs).subspan(w * in, in);
    std::copy(padded.begin() + w * dim, padded.begin() + w * dim + in,
              x.begin());
    auto z = std::span<double>(c.pre_activation).subspan(w * dim, dim);
    linalg::MatVec(weight, dim, in, x, z);
    for (size_t d = 0; d < dim; ++d) {
      z[d] += bias[d];
      double g = z[d] > 0.0 ? z[d] : 0.0;
      if (w == 0 || g > out[d]) {
        out[d] = g;
        c.argmax[d] = static_cast<uint32_t>(w);
      }
    }
  }
  return out;
}

std::vector<double> EntityEncoder::EncodeDescription(
    const ParamStore &store, std::span<const WordId> desc,
    DescriptionCache *cache) const {
  auto tokens = desc.first(std::min(desc.size(), config_.desc_max_len));
  return EncodeDescriptionRows(store, EmbedWords(store, tokens), cache);
}

std::vector<double> EntityEncoder::EncodeTypes(
    const ParamStore &store, std::span<const TypeId> types,
    std::span<const double> bow, std::vector<double> *attention,
    std::vector<double> *context) const {
  const size_t dim = config_.dim;
  std::vector<double> out(dim, 0.0);
  attention->clear();
  if (types.empty()) return out;

  std::vector<double> c(dim);
  linalg::MatVec(store[bow_w_].value.values(), dim, dim, bow, c);
  const Tensor &table = store[type_emb_].value;
  std::vector<double> logits(types.size());
  for (size_t j = 0; j < types.size(); ++j) {
    logits[j] = linalg::Dot(c, table.row(types[j]));
  }
  double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  attention->resize(types.size());
  for (size_t j = 0; j < types.size(); ++j) {
    (*attention)[j] = std::exp(logits[j] - top);
    total += (*attention)[j];
  }
  for (size_t j = 0; j < types.size(); ++j) {
    (*attention)[j] /= total;
    linalg::Axpy((*attention)[j], table.row(types[j]), out);
  }
  if (context != nullptr) *context = std::move(c);
  return out;
}

std::vector<double> EntityEncoder::EncodeTypes(
    const ParamStore &store, std::span<const TypeId> types,
    std::span<const WordId> context_words,
    std::vector<double> *attention) const {
  std::vector<double> bow = BagOfWords(EmbedWords(store, context_words));
  return EncodeTypes(store, types, bow, attention);
}

SemanticEntityRep EntityEncoder::EncodeEntity(const ParamStore &store,
                                              const Entity &entity,
                                              std::span<const double> bow,
                                              EntityCache *cache) const {
  const size_t dim = config_.dim;
  EntityCache local;
  EntityCache &c = cache != nullptr ? *cache : local;
  c = EntityCache();
  SemanticEntityRep rep;
  rep.v_emb.assign(dim, 0.0);
  rep.v_des.assign(dim, 0.0);
  rep.v_type.assign(dim, 0.0);

  if (switches_.embed) {
    auto row = store[entity_emb_].value.row(entity.id);
    rep.v_emb.assign(row.begin(), row.end());
  }
  if (switches_.description) {
    size_t n = std::min(entity.description.size(), config_.desc_max_len);
    c.desc_tokens.assign(entity.description.begin(),
                         entity.description.begin() + n);
    rep.v_des = EncodeDescription(store, c.desc_tokens, &c.desc);
  }
  if (switches_.type) {
    rep.v_type = EncodeTypes(store, entity.types, bow, &rep.attention,
                             &c.context);
  }

  rep.v_sem = rep.v_emb;
  if (switches_.combine()) {
    std::vector<double> joint(2 * dim);
    std::copy(rep.v_des.begin(), rep.v_des.end(), joint.begin());
    std::copy(rep.v_type.begin(), rep.v_type.end(), joint.begin() + dim);
    linalg::MatVec(store[combine_w_].value.values(), dim, 2 * dim, joint,
                   rep.v_sem, /*accumulate=*/true);
    linalg::Axpy(1.0, store[combine_b_].value.values(), rep.v_sem);
  }
  return rep;
}

SemanticEntityRep EntityEncoder::EncodeEntity(
    const ParamStore &store, const Entity &entity,
    std::span<const WordId> context_words) const {
  std::vector<double> bow = BagOfWords(EmbedWords(store, context_words));
  return EncodeEntity(store, entity, bow);
}

void EntityEncoder::EncodeEntityBackward(
    const ParamStore &store, const Entity &entity, std::span<const double> bow,
    const SemanticEntityRep &rep, const EntityCache &cache,
    std::span<const double> d_sem, GradBuffer &grads,
    std::span<double> d_bow) const {
  const size_t dim = config_.dim;
  if (switches_.embed) {
    linalg::Axpy(1.0, d_sem, grads[entity_emb_].subspan(entity.id * dim, dim));
  }
  if (!switches_.combine()) return;

  std::vector<double> joint(2 * dim);
  std::copy(rep.v_des.begin(), rep.v_des.end(), joint.begin());
  std::copy(rep.v_type.begin(), rep.v_type.end(), joint.begin() + dim);
  linalg::OuterAcc(d_sem, joint, grads[combine_w_]);
  linalg::Axpy(1.0, d_sem, grads[combine_b_]);
  std::vector<double> d_joint(2 * dim, 0.0);
  linalg::MatTVecAcc(store[combine_w_].value.values(), dim, 2 * dim, d_sem,
                     d_joint);
  auto d_des = std::span<const double>(d_joint).first(dim);
  auto d_type = std::span<const double>(d_joint).subspan(dim, dim);

  if (switches_.description && cache.desc.windows > 0) {
    const DescriptionCache &dc = cache.desc;
    const size_t h = config_.desc_window;
    const size_t in = h * dim;
    std::vector<double> dz(dc.windows * dim, 0.0);
    for (size_t d = 0; d < dim; ++d) {
      size_t w = dc.argmax[d];
      if (dc.pre_activation[w * dim + d] > 0.0) dz[w * dim + d] = d_des[d];
    }
    auto weight = store[desc_w_].value.values();
    size_t m = cache.desc_tokens.size();
    std::vector<double> d_rows(std::max(m, h) * dim, 0.0);
    for (size_t w = 0; w < dc.windows; ++w) {
      auto g = std::span<const double>(dz).subspan(w * dim, dim);
      auto x = std::span<const double>(dc.inputs).subspan(w * in, in);
      linalg::OuterAcc(g, x, grads[desc_w_]);
      linalg::Axpy(1.0, g, grads[desc_b_]);
      linalg::MatTVecAcc(weight, dim, in, g,
                         std::span<double>(d_rows).subspan(w * dim, in));
    }
    // Rows past m are padding and carry no parameters.
    EmbedWordsBackward(cache.desc_tokens,
                       std::span<const double>(d_rows).first(m * dim), grads);
  }

  if (switches_.type && !entity.types.empty()) {
    const Tensor &table = store[type_emb_].value;
    auto d_table = grads[type_emb_];
    const auto &a = rep.attention;
    size_t n = entity.types.size();
    std::vector<double> da(n);
    double weighted = 0.0;
    for (size_t j = 0; j < n; ++j) {
      da[j] = linalg::Dot(table.row(entity.types[j]), d_type);
      weighted += a[j] * da[j];
    }
    std::vector<double> dc(dim, 0.0);
    for (size_t j = 0; j < n; ++j) {
      double dp = a[j] * (da[j] - weighted);
      auto d_f = d_table.subspan(entity.types[j] * dim, dim);
      linalg::Axpy(a[j], d_type, d_f);
      linalg::Axpy(dp, cache.context, d_f);
      linalg::Axpy(dp, table.row(entity.types[j]), dc);
    }
    linalg::OuterAcc(dc, bow, grads[bow_w_]);
    linalg::MatTVecAcc(store[bow_w_].value.values(), dim, dim, dc, d_bow);
  }
}

}  // namespace edrm
