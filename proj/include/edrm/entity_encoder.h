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

// Word embedding lookup and the semantic entity representation:
//
//   v_sem = v_emb + W_e [v_des ; v_type] + b_e
//
// where v_des is a max-pooled one-layer CNN over the entity description and
// v_type is an attention-weighted sum of type embeddings, the attention
// logits being P_j = (W_bow sum_i v_{t_i}) . v_{f_j} over the words of the
// text the entity was found in.

#ifndef EDRM_ENTITY_ENCODER_H_
#define EDRM_ENTITY_ENCODER_H_

#include <span>
#include <vector>

#include "edrm/knowledge_store.h"
#include "edrm/param_store.h"
#include "edrm/rng.h"

namespace edrm {

namespace params {
inline constexpr char kWordEmbedding[] = "emb_word";
inline constexpr char kEntityEmbedding[] = "emb_entity";
inline constexpr char kTypeEmbedding[] = "emb_type";
inline constexpr char kDescWeight[] = "desc_cnn.w";
inline constexpr char kDescBias[] = "desc_cnn.b";
inline constexpr char kBowWeight[] = "type_attn.w_bow";
inline constexpr char kCombineWeight[] = "combine.w";
inline constexpr char kCombineBias[] = "combine.b";
}  // namespace params

struct EncoderConfig {
  size_t dim = 32;
  // Description CNN window; the filter count always equals dim.
  size_t desc_window = 3;
  size_t desc_max_len = 64;
  // Mean instead of sum for the attention context.
  bool bow_mean = false;
  uint32_t word_vocab = 0;
  uint32_t entity_vocab = 0;
  uint32_t type_vocab = 0;

  void Validate() const;
};

// Which knowledge-graph semantics enter v_sem. Absent branches are zero.
struct EntitySwitches {
  bool embed = true;
  bool type = true;
  bool description = true;

  bool any() const { return embed || type || description; }
  bool combine() const { return type || description; }
};

struct SemanticEntityRep {
  std::vector<double> v_emb;
  std::vector<double> v_des;
  std::vector<double> v_type;
  std::vector<double> v_sem;
  // Softmax weights over the entity's types; empty when it has none.
  std::vector<double> attention;
};

// Intermediate values kept from the forward pass for backprop.
struct DescriptionCache {
  size_t windows = 0;
  std::vector<double> inputs;         // windows x (window * dim)
  std::vector<double> pre_activation; // windows x dim
  std::vector<uint32_t> argmax;       // dim, lowest window on ties
};

struct EntityCache {
  TokenSeq desc_tokens;
  DescriptionCache desc;
  std::vector<double> context;  // W_bow * bow
};

Tensor UniformTensor(std::vector<size_t> shape, double limit, Rng &rng);
// Xavier-uniform for an (out x in) weight.
Tensor XavierTensor(size_t out, size_t in, Rng &rng);

class EntityEncoder {
 public:
  EntityEncoder(const EncoderConfig &config, EntitySwitches switches,
                const ParamStore &store);

  // Creates the encoder's parameters. Embedding tables are uniform(-0.05,
  // 0.05), weights Xavier-uniform and biases zero, each drawn from its own
  // named stream. Parameters of disabled branches are created but frozen.
  static void AddParams(ParamStore &store, const EncoderConfig &config,
                        EntitySwitches switches, uint64_t seed);

  const EncoderConfig &config() const { return config_; }
  const EntitySwitches &switches() const { return switches_; }

  // Out-of-vocabulary ids map to the reserved UNK row 0.
  WordId ClampWord(WordId w) const {
    return w < config_.word_vocab ? w : 0;
  }

  // (n x dim) rows of Emb_w.
  std::vector<double> EmbedWords(const ParamStore &store,
                                 std::span<const WordId> tokens) const;
  void EmbedWordsBackward(std::span<const WordId> tokens,
                          std::span<const double> d_rows,
                          GradBuffer &grads) const;

  // Sum (or mean) of the given (n x dim) rows.
  std::vector<double> BagOfWords(std::span<const double> rows) const;

  // Max-pooled ReLU CNN over (m x dim) rows; rows shorter than one window
  // are zero-padded to a single window. Empty input gives the zero vector.
  std::vector<double> EncodeDescriptionRows(const ParamStore &store,
                                            std::span<const double> rows,
                                            DescriptionCache *cache) const;
  std::vector<double> EncodeDescription(const ParamStore &store,
                                        std::span<const WordId> desc,
                                        DescriptionCache *cache = nullptr) const;

  // Attention-combined type embedding. Empty type lists give the zero
  // vector and no attention weights.
  std::vector<double> EncodeTypes(const ParamStore &store,
                                  std::span<const TypeId> types,
                                  std::span<const double> bow,
                                  std::vector<double> *attention,
                                  std::vector<double> *context = nullptr) const;
  std::vector<double> EncodeTypes(const ParamStore &store,
                                  std::span<const TypeId> types,
                                  std::span<const WordId> context_words,
                                  std::vector<double> *attention) const;

  SemanticEntityRep EncodeEntity(const ParamStore &store, const Entity &entity,
                                 std::span<const double> bow,
                                 EntityCache *cache = nullptr) const;
  SemanticEntityRep EncodeEntity(const ParamStore &store, const Entity &entity,
                                 std::span<const WordId> context_words) const;

  // Adds the gradients of v_sem . d_sem into grads and d_bow.
  void EncodeEntityBackward(const ParamStore &store, const Entity &entity,
                            std::span<const double> bow,
                            const SemanticEntityRep &rep,
                            const EntityCache &cache,
                            std::span<const double> d_sem, GradBuffer &grads,
                            std::span<double> d_bow) const;

 private:
  EncoderConfig config_;
  EntitySwitches switches_;
  size_t word_emb_;
  size_t entity_emb_;
  size_t type_emb_;
  size_t desc_w_;
  size_t desc_b_;
  size_t bow_w_;
  size_t combine_w_;
  size_t combine_b_;
};

}  // namespace edrm

#endif  // EDRM_ENTITY_ENCODER_H_
