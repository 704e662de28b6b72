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

// The entity-duet ranking model on top of K-NRM or Conv-KNRM kernels:
//
//   f(q, d) = tanh(w_r . Phi(M) + b_r)
//
// trained with the pairwise hinge loss max(0, 1 - f(q, d+) + f(q, d-)).

#ifndef EDRM_MODEL_H_
#define EDRM_MODEL_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edrm/checkpoint.h"
#include "edrm/corpus.h"
#include "edrm/entity_encoder.h"
#include "edrm/interaction.h"
#include "edrm/kernel_features.h"
#include "edrm/optimizer.h"

namespace edrm {

namespace params {
inline constexpr char kRankWeight[] = "rank.w";
inline constexpr char kRankBias[] = "rank.b";
// "ngram.<h>.w" / "ngram.<h>.b" for Conv-KNRM.
std::string NgramWeight(int h);
std::string NgramBias(int h);
}  // namespace params

enum class ModelMode { kKnrm, kConvKnrm };

struct ModelConfig {
  ModelMode mode = ModelMode::kKnrm;
  // Longest n-gram composed by Conv-KNRM. Ignored for K-NRM.
  int max_ngram = 3;
  EntitySwitches switches;
  EncoderConfig encoder;
  KernelBank kernels;
  OptimizerConfig optimizer;
  uint64_t seed = 1;

  size_t max_query_words = 16;
  size_t max_query_entities = 8;
  size_t max_doc_words = 64;
  size_t max_doc_entities = 16;

  size_t batch_size = 64;
  size_t max_epochs = 50;
  size_t max_pairs_per_query = 0;
  // Share of training queries held out for early stopping.
  double valid_fraction = 0.1;

  int ngram_count() const {
    return mode == ModelMode::kKnrm ? 1 : max_ngram;
  }
  // With every semantic switch off the entity channel disappears and the
  // model is the word-only K-NRM / Conv-KNRM.
  bool entity_channel() const { return switches.any(); }

  // "word", "embed", "type", "description", "embed+type", ... , "full".
  std::string VariantName() const;

  // Flat key=value lines; every key is accepted back by Set().
  std::string ToText() const;
  void Set(const std::string &key, const std::string &value);
  // Applies "key=value" lines on top of this config. '#' starts a comment.
  void Apply(const std::string &text);
  void Validate() const;
};

// The ablation variant list: word-only baseline, the five partial
// semantic combinations and the full model, in that order.
std::vector<std::pair<std::string, EntitySwitches>> AblationVariants();
EntitySwitches SwitchesForVariant(const std::string &name);

class EdrmModel {
 public:
  // Fresh parameters drawn from config.seed.
  EdrmModel(const ModelConfig &config, const KnowledgeGraph &kg);
  EdrmModel(const ModelConfig &config, const KnowledgeGraph &kg,
            ParamStore params);

  static EdrmModel FromCheckpoint(const Checkpoint &checkpoint,
                                  const KnowledgeGraph &kg);
  Checkpoint ToCheckpoint() const;

  const ModelConfig &config() const { return config_; }
  const KnowledgeGraph &kg() const { return *kg_; }
  const EntityEncoder &encoder() const { return encoder_; }
  const std::vector<BlockKind> &layout() const { return layout_; }
  ParamStore &params() { return params_; }
  const ParamStore &params() const { return params_; }

  double Score(const DuetText &query, const DuetText &doc) const {
    return Score(params_, query, doc);
  }
  double Score(const ParamStore &store, const DuetText &query,
               const DuetText &doc) const;

  // Phi(M) in layout order.
  FeatureVector Features(const ParamStore &store, const DuetText &query,
                         const DuetText &doc) const;
  std::vector<TranslationMatrix> Matrices(const ParamStore &store,
                                          const DuetText &query,
                                          const DuetText &doc) const;

  // Sum of hinge losses over the batch. When grads is non-null the loss
  // gradient is added to it.
  double PairwiseLoss(const ParamStore &store,
                      std::span<const PairwiseInstance> batch,
                      GradBuffer *grads) const;

  // max(0, 1 - positive + negative).
  static double Hinge(double positive, double negative) {
    double margin = 1.0 - positive + negative;
    return margin > 0.0 ? margin : 0.0;
  }

 private:
  struct Side;
  struct Pass;

  void Init();
  Side EncodeSide(const ParamStore &store, const DuetText &text,
                  bool is_query) const;
  Pass Forward(const ParamStore &store, const Side &query,
               const Side &doc) const;
  // d(score) = upstream; accumulates term gradients for both sides.
  void BackwardPass(const ParamStore &store, const Side &query,
                    const Side &doc, const Pass &pass, double upstream,
                    std::vector<std::vector<double>> &d_query_terms,
                    std::vector<std::vector<double>> &d_doc_terms,
                    GradBuffer &grads) const;
  void BackwardSide(const ParamStore &store, const Side &side,
                    const std::vector<std::vector<double>> &d_terms,
                    GradBuffer &grads) const;
  std::vector<std::vector<double>> ZeroTermGrads(const Side &side) const;

  ModelConfig config_;
  const KnowledgeGraph *kg_;
  ParamStore params_;
  EntityEncoder encoder_;
  std::vector<BlockKind> layout_;
  std::vector<size_t> ngram_w_;
  std::vector<size_t> ngram_b_;
  size_t rank_w_;
  size_t rank_b_;
};

// Adds every model parameter for config into store.
void AddModelParams(ParamStore &store, const ModelConfig &config);

}  // namespace edrm

#endif  // EDRM_MODEL_H_
