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

#include "edrm/model.h"

#include <cmath>

#include "edrm/io.h"
#include "linalg.h"

namespace edrm {

namespace params {
std::string NgramWeight(int h) { return "ngram." + std::to_string(h) + ".w"; }
std::string NgramBias(int h) { return "ngram." + std::to_string(h) + ".b"; }
}  // namespace params

namespace {

const char *BoolText(bool b) { return b ? "true" : "false"; }

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ValidationError("config " + key + ": expected true/false, got '" +
                        value + "'");
}

uint64_t ParseCount(const std::string &key, const std::string &value) {
  uint64_t v = 0;
  if (!ParseUint(value, &v)) {
    throw ValidationError("config " + key + ": expected an integer, got '" +
                          value + "'");
  }
  return v;
}

double ParseReal(const std::string &key, const std::string &value) {
  double v = 0.0;
  if (!ParseDouble(value, &v)) {
    throw ValidationError("config " + key + ": expected a number, got '" +
                          value + "'");
  }
  return v;
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<std::pair<std::string, EntitySwitches>> AblationVariants() {
  return {
      {"word", {false, false, false}},
      {"embed", {true, false, false}},
      {"type", {false, true, false}},
      {"description", {false, false, true}},
      {"embed+type", {true, true, false}},
      {"embed+description", {true, false, true}},
      {"full", {true, true, true}},
  };
}

EntitySwitches SwitchesForVariant(const std::string &name) {
  for (const auto &[variant, switches] : AblationVariants()) {
    if (variant == name) return switches;
  }
  if (name == "type+description") return {false, true, true};
  throw ValidationError("unknown variant '" + name + "'");
}

std::string ModelConfig::VariantName() const {
  for (const auto &[variant, s] : AblationVariants()) {
    if (s.embed == switches.embed && s.type == switches.type &&
        s.description == switches.description) {
      return variant;
    }
  }
  return "type+description";
}

std::string ModelConfig::ToText() const {
  std::string out;
  auto put = [&out](const char *key, const std::string &value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  put("mode", mode == ModelMode::kKnrm ? "knrm" : "cknrm");
  put("max_ngram", std::to_string(max_ngram));
  put("embed", BoolText(switches.embed));
  put("type", BoolText(switches.type));
  put("description", BoolText(switches.description));
  put("dim", std::to_string(encoder.dim));
  put("desc_window", std::to_string(encoder.desc_window));
  put("desc_max_len", std::to_string(encoder.desc_max_len));
  put("bow_mean", BoolText(encoder.bow_mean));
  put("word_vocab", std::to_string(encoder.word_vocab));
  put("entity_vocab", std::to_string(encoder.entity_vocab));
  put("type_vocab", std::to_string(encoder.type_vocab));
  put("kernels", kernels.ToString());
  put("learning_rate", FormatDouble(optimizer.learning_rate));
  put("epsilon", FormatDouble(optimizer.epsilon));
  put("beta1", FormatDouble(optimizer.beta1));
  put("beta2", FormatDouble(optimizer.beta2));
  put("patience", std::to_string(optimizer.patience));
  put("seed", std::to_string(seed));
  put("max_query_words", std::to_string(max_query_words));
  put("max_query_entities", std::to_string(max_query_entities));
  put("max_doc_words", std::to_string(max_doc_words));
  put("max_doc_entities", std::to_string(max_doc_entities));
  put("batch_size", std::to_string(batch_size));
  put("max_epochs", std::to_string(max_epochs));
  put("max_pairs_per_query", std::to_string(max_pairs_per_query));
  put("valid_fraction", FormatDouble(valid_fraction));
  return out;
}

void ModelConfig::Set(const std::string &key, const std::string &value) {
  if (key == "mode") {
    if (value == "knrm") {
      mode = ModelMode::kKnrm;
    } else if (value == "cknrm") {
      mode = ModelMode::kConvKnrm;
    } else {
      throw ValidationError("config mode: expected knrm or cknrm, got '" +
                            value + "'");
    }
  } else if (key == "max_ngram") {
    max_ngram = static_cast<int>(ParseCount(key, value));
  } else if (key == "variant") {
    switches = SwitchesForVariant(value);
  } else if (key == "embed") {
    switches.embed = ParseBool(key, value);
  } else if (key == "type") {
    switches.type = ParseBool(key, value);
  } else if (key == "description") {
    switches.description = ParseBool(key, value);
  } else if (key == "dim") {
    encoder.dim = ParseCount(key, value);
  } else if (key == "desc_window") {
    encoder.desc_window = ParseCount(key, value);
  } else if (key == "desc_max_len") {
    encoder.desc_max_len = ParseCount(key, value);
  } else if (key == "bow_mean") {
    encoder.bow_mean = ParseBool(key, value);
  } else if (key == "word_vocab") {
    encoder.word_vocab = static_cast<uint32_t>(ParseCount(key, value));
  } else if (key == "entity_vocab") {
    encoder.entity_vocab = static_cast<uint32_t>(ParseCount(key, value));
  } else if (key == "type_vocab") {
    encoder.type_vocab = static_cast<uint32_t>(ParseCount(key, value));
  } else if (key == "kernels") {
    if (value == "default") {
      kernels = KernelBank::Default();
    } else if (value.find(':') == std::string::npos) {
      kernels = KernelBank::Evenly(ParseCount(key, value));
    } else {
      kernels = KernelBank::Parse(value);
    }
  } else if (key == "learning_rate") {
    optimizer.learning_rate = ParseReal(key, value);
  } else if (key == "epsilon") {
    optimizer.epsilon = ParseReal(key, value);
  } else if (key == "beta1") {
    optimizer.beta1 = ParseReal(key, value);
  } else if (key == "beta2") {
    optimizer.beta2 = ParseReal(key, value);
  } else if (key == "patience") {
    optimizer.patience = static_cast<int>(ParseCount(key, value));
  } else if (key == "seed") {
    seed = ParseCount(key, value);
  } else if (key == "max_query_words") {
    max_query_words = ParseCount(key, value);
  } else if (key == "max_query_entities") {
    max_query_entities = ParseCount(key, value);
  } else if (key == "max_doc_words") {
    max_doc_words = ParseCount(key, value);
  } else if (key == "max_doc_entities") {
    max_doc_entities = ParseCount(key, value);
  } else if (key == "batch_size") {
    batch_size = ParseCount(key, value);
  } else if (key == "max_epochs") {
    max_epochs = ParseCount(key, value);
  } else if (key == "max_pairs_per_query") {
    max_pairs_per_query = ParseCount(key, value);
  } else if (key == "valid_fraction") {
    valid_fraction = ParseReal(key, value);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void ModelConfig::Apply(const std::string &text) {
  size_t line_no = 0;
  for (std::string_view raw : Split(text, '\n')) {
    ++line_no;
    std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key=value");
    }
    Set(Trim(std::string_view(line).substr(0, eq)),
        Trim(std::string_view(line).substr(eq + 1)));
  }
}

void ModelConfig::Validate() const {
  encoder.Validate();
  optimizer.Validate();
  if (mode == ModelMode::kConvKnrm && (max_ngram < 1 || max_ngram > 8)) {
    throw ValidationError("max_ngram must be in [1, 8]");
  }
  if (max_query_words < 1 || max_doc_words < 1) {
    throw ValidationError("maximum text lengths must be >= 1");
  }
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(valid_fraction >= 0.0 && valid_fraction < 1.0)) {
    throw ValidationError("valid_fraction must be in [0, 1)");
  }
}

void AddModelParams(ParamStore &store, const ModelConfig &config) {
  config.Validate();
  EntityEncoder::AddParams(store, config.encoder, config.switches,
                           config.seed);
  const size_t dim = config.encoder.dim;
  if (config.mode == ModelMode::kConvKnrm) {
    for (int h = 1; h <= config.max_ngram; ++h) {
      Rng rng = NamedStream(config.seed, "init/" + params::NgramWeight(h));
      store.Add(params::NgramWeight(h),
                XavierTensor(dim, static_cast<size_t>(h) * dim, rng));
      store.Add(params::NgramBias(h), Tensor({dim}));
    }
  }
  size_t features =
      BuildLayout(config.ngram_count(), config.entity_channel()).size() *
      config.kernels.size();
  // Log soft-TF features of an unmatched kernel sit near log(1e-10) per
  // query term, so the output layer starts close to zero to keep the tanh
  // out of saturation.
  Rng rng = NamedStream(config.seed, std::string("init/") + params::kRankWeight);
  store.Add(params::kRankWeight, UniformTensor({features}, 0.001, rng));
  store.Add(params::kRankBias, Tensor({1}));
}

struct EdrmModel::Side {
  TokenSeq words;
  TermSequence raw;
  std::vector<double> bow;
  std::vector<std::vector<double>> pre;
  std::vector<const Entity *> entities;
  std::vector<SemanticEntityRep> reps;
  std::vector<EntityCache> caches;
  DuetTerms terms;
};

struct EdrmModel::Pass {
  std::vector<TranslationMatrix> matrices;
  FeatureVector phi;
  double score = 0.0;
};

namespace {

ParamStore FreshParams(const ModelConfig &config) {
  ParamStore store;
  AddModelParams(store, config);
  return store;
}

}  // namespace

EdrmModel::EdrmModel(const ModelConfig &config, const KnowledgeGraph &kg)
    : EdrmModel(config, kg, FreshParams(config)) {}

EdrmModel::EdrmModel(const ModelConfig &config, const KnowledgeGraph &kg,
                     ParamStore params)
    : config_(config), kg_(&kg), params_(std::move(params)),
      encoder_(config.encoder, config.switches, params_) {
  Init();
}

void EdrmModel::Init() {
  config_.Validate();
  if (kg_->num_entities() > config_.encoder.entity_vocab) {
    throw ValidationError("knowledge graph has " +
                          std::to_string(kg_->num_entities()) +
                          " entities but the model covers " +
                          std::to_string(config_.encoder.entity_vocab));
  }
  // Every expected parameter must be present with the expected shape.
  ParamStore expected = FreshParams(config_);
  if (expected.size() != params_.size()) {
    throw ValidationError("model expects " + std::to_string(expected.size()) +
                          " parameters, got " +
                          std::to_string(params_.size()));
  }
  for (const Param &p : expected.params()) {
    if (!params_.Has(p.name)) {
      throw ValidationError("missing parameter " + p.name);
    }
    const Param &have = params_.Get(p.name);
    if (have.value.shape() != p.value.shape()) {
      throw ValidationError("parameter " + p.name + " has shape " +
                            ShapeString(have.value.shape()) + ", expected " +
                            ShapeString(p.value.shape()));
    }
  }
  layout_ = BuildLayout(config_.ngram_count(), config_.entity_channel());
  if (config_.mode == ModelMode::kConvKnrm) {
    for (int h = 1; h <= config_.max_ngram; ++h) {
      ngram_w_.push_back(params_.Index(params::NgramWeight(h)));
      ngram_b_.push_back(params_.Index(params::NgramBias(h)));
    }
  }
  rank_w_ = params_.Index(params::kRankWeight);
  rank_b_ = params_.Index(params::kRankBias);
}

EdrmModel EdrmModel::FromCheckpoint(const Checkpoint &checkpoint,
                                    const KnowledgeGraph &kg) {
  ModelConfig config;
  config.Apply(checkpoint.config);
  const CheckpointHeader &h = checkpoint.header;
  if (h.dim != config.encoder.dim || h.kernels != config.kernels.size() ||
      h.word_vocab != config.encoder.word_vocab ||
      h.entity_vocab != config.encoder.entity_vocab ||
      h.type_vocab != config.encoder.type_vocab) {
    throw ValidationError("checkpoint header disagrees with its config");
  }
  return EdrmModel(config, kg, checkpoint.params);
}

Checkpoint EdrmModel::ToCheckpoint() const {
  Checkpoint c;
  c.header.dim = static_cast<uint32_t>(config_.encoder.dim);
  c.header.kernels = static_cast<uint32_t>(config_.kernels.size());
  c.header.word_vocab = config_.encoder.word_vocab;
  c.header.entity_vocab = config_.encoder.entity_vocab;
  c.header.type_vocab = config_.encoder.type_vocab;
  c.config = config_.ToText();
  c.params = params_;
  return c;
}

EdrmModel::Side EdrmModel::EncodeSide(const ParamStore &store,
                                      const DuetText &text,
                                      bool is_query) const {
  const size_t dim = config_.encoder.dim;
  size_t max_words = is_query ? config_.max_query_words : config_.max_doc_words;
  size_t max_entities =
      is_query ? config_.max_query_entities : config_.max_doc_entities;
  Side side;
  size_t n = std::min(text.words.size(), max_words);
  side.words.assign(text.words.begin(), text.words.begin() + n);
  side.raw = MakeTermSequence(TermSide::Words(1), dim,
                              encoder_.EmbedWords(store, side.words));

  if (config_.mode == ModelMode::kKnrm) {
    side.terms.grams.push_back(side.raw);
  } else {
    side.pre.resize(config_.max_ngram);
    for (int h = 1; h <= config_.max_ngram; ++h) {
      side.terms.grams.push_back(ComposeNgrams(
          side.raw, h, store[ngram_w_[h - 1]].value.values(),
          store[ngram_b_[h - 1]].value.values(), dim, &side.pre[h - 1]));
    }
  }

  std::vector<double> entity_rows;
  if (config_.entity_channel()) {
    side.bow = encoder_.BagOfWords(side.raw.vectors);
    for (const Mention &m : text.entities) {
      if (side.entities.size() >= max_entities) break;
      const Entity &e = kg_->entity(m.entity);
      side.entities.push_back(&e);
      side.caches.emplace_back();
      side.reps.push_back(
          encoder_.EncodeEntity(store, e, side.bow, &side.caches.back()));
      entity_rows.insert(entity_rows.end(), side.reps.back().v_sem.begin(),
                         side.reps.back().v_sem.end());
    }
  }
  side.terms.entities =
      MakeTermSequence(TermSide::Entities(), dim, std::move(entity_rows));
  return side;
}

EdrmModel::Pass EdrmModel::Forward(const ParamStore &store, const Side &query,
                                   const Side &doc) const {
  Pass pass;
  pass.matrices = DuetMatrices(query.terms, doc.terms, layout_);
  pass.phi = BuildPhi(pass.matrices, layout_, config_.kernels);
  auto w = store[rank_w_].value.values();
  double sum = 0.0;
  for (size_t f = 0; f < w.size(); ++f) sum += w[f] * pass.phi.values[f];
  pass.score = std::tanh(sum + store[rank_b_].value.values()[0]);
  return pass;
}

namespace {

size_t TermIndex(TermSide side, int ngram_count) {
  return side.entity ? static_cast<size_t>(ngram_count)
                     : static_cast<size_t>(side.ngram - 1);
}

}  // namespace

std::vector<std::vector<double>> EdrmModel::ZeroTermGrads(
    const Side &side) const {
  std::vector<std::vector<double>> d;
  for (const TermSequence &g : side.terms.grams) {
    d.emplace_back(g.vectors.size(), 0.0);
  }
  d.emplace_back(side.terms.entities.vectors.size(), 0.0);
  return d;
}

void EdrmModel::BackwardPass(const ParamStore &store, const Side &query,
                             const Side &doc, const Pass &pass,
                             double upstream,
                             std::vector<std::vector<double>> &d_query_terms,
                             std::vector<std::vector<double>> &d_doc_terms,
                             GradBuffer &grads) const {
  double d_z = upstream * (1.0 - pass.score * pass.score);
  if (d_z == 0.0) return;
  linalg::Axpy(d_z, pass.phi.values, grads[rank_w_]);
  grads[rank_b_][0] += d_z;
  auto w = store[rank_w_].value.values();
  const size_t k = config_.kernels.size();
  const int ngrams = config_.ngram_count();
  std::vector<double> d_phi(k);
  for (size_t b = 0; b < layout_.size(); ++b) {
    const TranslationMatrix &m = pass.matrices[b];
    if (m.rows == 0 || m.cols == 0) continue;
    for (size_t i = 0; i < k; ++i) d_phi[i] = d_z * w[b * k + i];
    std::vector<double> d_scores(m.rows * m.cols, 0.0);
    KernelPoolBackward(m, config_.kernels, d_phi, d_scores);
    const BlockKind &kind = layout_[b];
    TranslationMatrixBackward(m, query.terms.Get(kind.query),
                              doc.terms.Get(kind.doc), d_scores,
                              d_query_terms[TermIndex(kind.query, ngrams)],
                              d_doc_terms[TermIndex(kind.doc, ngrams)]);
  }
}

void EdrmModel::BackwardSide(const ParamStore &store, const Side &side,
                             const std::vector<std::vector<double>> &d_terms,
                             GradBuffer &grads) const {
  const size_t dim = config_.encoder.dim;
  const int ngrams = config_.ngram_count();
  std::vector<double> d_rows(side.raw.vectors.size(), 0.0);

  if (config_.entity_channel() && !side.entities.empty()) {
    std::vector<double> d_bow(dim, 0.0);
    const std::vector<double> &d_ent = d_terms[ngrams];
    for (size_t e = 0; e < side.entities.size(); ++e) {
      encoder_.EncodeEntityBackward(
          store, *side.entities[e], side.bow, side.reps[e], side.caches[e],
          std::span<const double>(d_ent).subspan(e * dim, dim), grads, d_bow);
    }
    size_t n = side.words.size();
    double scale = config_.encoder.bow_mean && n > 0
                       ? 1.0 / static_cast<double>(n)
                       : 1.0;
    for (size_t i = 0; i < n; ++i) {
      linalg::Axpy(scale, d_bow,
                   std::span<double>(d_rows).subspan(i * dim, dim));
    }
  }

  if (config_.mode == ModelMode::kKnrm) {
    linalg::Axpy(1.0, d_terms[0], d_rows);
  } else {
    for (int h = 1; h <= config_.max_ngram; ++h) {
      ComposeNgramsBackward(side.raw, h, store[ngram_w_[h - 1]].value.values(),
                            dim, side.pre[h - 1], d_terms[h - 1], d_rows,
                            grads[ngram_w_[h - 1]], grads[ngram_b_[h - 1]]);
    }
  }
  encoder_.EmbedWordsBackward(side.words, d_rows, grads);
}

double EdrmModel::Score(const ParamStore &store, const DuetText &query,
                        const DuetText &doc) const {
  Side q = EncodeSide(store, query, true);
  Side d = EncodeSide(store, doc, false);
  return Forward(store, q, d).score;
}

FeatureVector EdrmModel::Features(const ParamStore &store,
                                  const DuetText &query,
                                  const DuetText &doc) const {
  Side q = EncodeSide(store, query, true);
  Side d = EncodeSide(store, doc, false);
  return Forward(store, q, d).phi;
}

std::vector<TranslationMatrix> EdrmModel::Matrices(const ParamStore &store,
                                                   const DuetText &query,
                                                   const DuetText &doc) const {
  Side q = EncodeSide(store, query, true);
  Side d = EncodeSide(store, doc, false);
  return DuetMatrices(q.terms, d.terms, layout_);
}

double EdrmModel::PairwiseLoss(const ParamStore &store,
                               std::span<const PairwiseInstance> batch,
                               GradBuffer *grads) const {
  double total = 0.0;
  for (const PairwiseInstance &inst : batch) {
    Side q = EncodeSide(store, *inst.query_text, true);
    Side pos = EncodeSide(store, *inst.positive_text, false);
    Side neg = EncodeSide(store, *inst.negative_text, false);
    Pass p = Forward(store, q, pos);
    Pass n = Forward(store, q, neg);
    double loss = Hinge(p.score, n.score);
    total += loss;
    if (grads == nullptr || loss <= 0.0) continue;
    auto d_q = ZeroTermGrads(q);
    auto d_pos = ZeroTermGrads(pos);
    auto d_neg = ZeroTermGrads(neg);
    BackwardPass(store, q, pos, p, -1.0, d_q, d_pos, *grads);
    BackwardPass(store, q, neg, n, 1.0, d_q, d_neg, *grads);
    BackwardSide(store, pos, d_pos, *grads);
    BackwardSide(store, neg, d_neg, *grads);
    BackwardSide(store, q, d_q, *grads);
  }
  return total;
}

}  // namespace edrm
