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

#include "doctest.h"
#include "edrm/grad_check.h"
#include "edrm/word_ranker.h"
#include "test_util.h"

namespace edrm {
namespace {

using testing::Text;
using testing::ToyKg;

ModelConfig SmallConfig(ModelMode mode, EntitySwitches switches) {
  ModelConfig c;
  c.mode = mode;
  c.max_ngram = 2;
  c.switches = switches;
  c.encoder.dim = 6;
  c.encoder.word_vocab = 30;
  c.encoder.entity_vocab = 5;
  c.encoder.type_vocab = 4;
  c.kernels = KernelBank::Evenly(5);
  c.seed = 7;
  return c;
}

struct Fixture {
  CorpusStore corpus;
  std::vector<PairwiseInstance> batch;

  Fixture() {
    // Entities shared across sides have a single type, so their query and
    // doc vectors coincide and stay clear of the exact-match kernel slope.
    corpus.queries[0] = Text({3, 6, 7}, {{2, 0, 1}});
    corpus.queries[1] = Text({4, 8}, {{3, 0, 1}});
    corpus.docs[0] = Text({3, 9, 6, 20, 21}, {{2, 0, 1}, {4, 3, 4}});
    corpus.docs[1] = Text({1, 2, 22, 23}, {{0, 0, 2}});
    corpus.docs[2] = Text({24, 7, 25, 26, 27, 28});
    corpus.docs[3] = Text({4, 8, 29}, {{3, 0, 1}});
    corpus.docs[4] = Text({1, 11, 12}, {{1, 0, 1}});
    auto add = [this](QueryId q, DocId pos, DocId neg) {
      batch.push_back({q, pos, neg, &corpus.queries[q], &corpus.docs[pos],
                       &corpus.docs[neg]});
    };
    // One positive per query. A full ranked triangle would cancel the
    // middle document's gradient exactly, leaving only roundoff to compare.
    add(0, 0, 1);
    add(0, 0, 2);
    add(1, 3, 4);
    add(1, 3, 2);
  }
};

void ExpectGradientsMatch(ModelMode mode, EntitySwitches switches) {
  KnowledgeGraph kg = ToyKg();
  EdrmModel model(SmallConfig(mode, switches), kg);
  testing::Randomize(model.params(), 0.3, 11);
  // Keep the ranking layer small so tanh is not saturated.
  {
    Param &w = model.params().Get(params::kRankWeight);
    std::vector<double> v(w.value.values().begin(), w.value.values().end());
    for (double &x : v) x *= 0.02;
    w.value = Tensor(w.value.shape(), v);
  }
  Fixture f;
  LossGradFn fn = [&](const ParamStore &store, GradBuffer *grads) {
    return model.PairwiseLoss(store, f.batch, grads);
  };
  GradCheckOptions options;
  // Near log(eps) the kernel features bend sharply; a smaller step keeps
  // truncation error below the tolerance on random parameters.
  options.step = 1e-5;
  options.tolerance = 1e-4;
  GradCheckReport report = GradCheck(fn, model.params(), options);
  INFO(report.Summary());
  CHECK(report.pass);
}

TEST_CASE("knrm gradients match finite differences") {
  ExpectGradientsMatch(ModelMode::kKnrm, {true, true, true});
}

TEST_CASE("conv-knrm gradients match finite differences") {
  ExpectGradientsMatch(ModelMode::kConvKnrm, {true, true, true});
}

TEST_CASE("partial semantics gradients match finite differences") {
  ExpectGradientsMatch(ModelMode::kConvKnrm, {false, true, false});
  ExpectGradientsMatch(ModelMode::kKnrm, {false, false, true});
}

TEST_CASE("hinge") {
  CHECK(EdrmModel::Hinge(0.5, 0.2) == doctest::Approx(0.7));
  CHECK(EdrmModel::Hinge(0.9, -0.5) == 0.0);
  CHECK(EdrmModel::Hinge(-1.0, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("word-only knrm score matches a direct computation") {
  KnowledgeGraph kg = ToyKg();
  ModelConfig config = SmallConfig(ModelMode::kKnrm, {false, false, false});
  EdrmModel model(config, kg);
  testing::Randomize(model.params(), 0.5, 3);
  const ParamStore &p = model.params();
  DuetText q = Text({3, 6});
  DuetText d = Text({6, 9, 12, 3, 3});

  auto emb = [&](WordId w) { return p.Get(params::kWordEmbedding).value.row(w); };
  auto cosine = [](std::span<const double> a, std::span<const double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
  };
  const KernelBank &bank = config.kernels;
  std::vector<double> phi(bank.size(), 0.0);
  for (WordId qw : q.words) {
    for (size_t k = 0; k < bank.size(); ++k) {
      double s = 0.0;
      for (WordId dw : d.words) {
        double m = cosine(emb(qw), emb(dw));
        s += std::exp(-(m - bank[k].mu) * (m - bank[k].mu) /
                      (2 * bank[k].sigma * bank[k].sigma));
      }
      phi[k] += std::log(s + 1e-10);
    }
  }
  double z = p.Get(params::kRankBias).value.values()[0];
  for (size_t k = 0; k < phi.size(); ++k) {
    z += p.Get(params::kRankWeight).value.values()[k] * phi[k];
  }
  CHECK(model.Score(q, d) == doctest::Approx(std::tanh(z)).epsilon(1e-12));
  CHECK(model.layout().size() == 1);
}

TEST_CASE("word-only models match the plain word rankers bit for bit") {
  KnowledgeGraph kg = ToyKg();
  Rng rng = NamedStream(3, "test/bitwise");
  for (ModelMode mode : {ModelMode::kKnrm, ModelMode::kConvKnrm}) {
    ModelConfig c = SmallConfig(mode, {false, false, false});
    c.kernels = KernelBank::Default();
    EdrmModel model(c, kg);
    testing::Randomize(model.params(), 0.5, 4);
    WordRanker plain(c, model.params());
    for (int t = 0; t < 200; ++t) {
      TokenSeq q(1 + UniformInt(rng, 20)), d(1 + UniformInt(rng, 80));
      for (WordId &w : q) w = static_cast<WordId>(UniformInt(rng, 30));
      for (WordId &w : d) w = static_cast<WordId>(UniformInt(rng, 30));
      // Entity mentions are ignored without an entity channel.
      DuetText qt = Text(q, {{2, 0, 1}});
      DuetText dt = Text(d);
      CHECK(model.Score(qt, dt) == plain.Score(q, d));
      CHECK(model.Features(model.params(), qt, dt).values == plain.Features(q, d));
    }
  }
}

TEST_CASE("layout sizes per mode") {
  KnowledgeGraph kg = ToyKg();
  CHECK(EdrmModel(SmallConfig(ModelMode::kKnrm, {}), kg).layout().size() == 4);
  CHECK(EdrmModel(SmallConfig(ModelMode::kConvKnrm, {}), kg).layout().size() ==
        9);
  CHECK(EdrmModel(SmallConfig(ModelMode::kConvKnrm, {false, false, false}), kg)
            .layout()
            .size() == 4);
  EdrmModel m(SmallConfig(ModelMode::kConvKnrm, {}), kg);
  CHECK(m.params().Get(params::kRankWeight).value.size() == 9 * 5);
}

TEST_CASE("truncation drops tokens beyond the limits") {
  KnowledgeGraph kg = ToyKg();
  ModelConfig config = SmallConfig(ModelMode::kConvKnrm, {});
  config.max_doc_words = 3;
  config.max_doc_entities = 1;
  EdrmModel model(config, kg);
  DuetText q = Text({3, 6}, {{2, 0, 1}});
  DuetText full = Text({3, 9, 6, 20, 1}, {{2, 0, 1}, {1, 4, 5}});
  DuetText cut = Text({3, 9, 6}, {{2, 0, 1}});
  CHECK(model.Score(q, full) == model.Score(q, cut));
}

TEST_CASE("disabled branches are frozen") {
  KnowledgeGraph kg = ToyKg();
  EdrmModel m(SmallConfig(ModelMode::kKnrm, {true, false, false}), kg);
  CHECK(m.params().Get(params::kEntityEmbedding).active);
  CHECK_FALSE(m.params().Get(params::kTypeEmbedding).active);
  CHECK_FALSE(m.params().Get(params::kDescWeight).active);
  CHECK_FALSE(m.params().Get(params::kCombineWeight).active);
}

TEST_CASE("config text round trip") {
  ModelConfig c = SmallConfig(ModelMode::kConvKnrm, {true, false, true});
  c.optimizer.learning_rate = 0.0025;
  c.valid_fraction = 0.2;
  ModelConfig back;
  back.Apply(c.ToText());
  CHECK(back.ToText() == c.ToText());
  CHECK(back.VariantName() == "embed+description");
  CHECK_THROWS_AS(back.Set("nonsense", "1"), ValidationError);
  CHECK_THROWS_AS(back.Set("mode", "bm25"), ValidationError);
  back.Apply("variant = word  # comment\n\nkernels=3\n");
  CHECK_FALSE(back.entity_channel());
  CHECK(back.kernels.size() == 3);
}

TEST_CASE("checkpoint round trip preserves scores") {
  KnowledgeGraph kg = ToyKg();
  EdrmModel model(SmallConfig(ModelMode::kConvKnrm, {}), kg);
  testing::Randomize(model.params(), 0.2, 5);
  Checkpoint c = ParseCheckpoint(SerializeCheckpoint(model.ToCheckpoint()));
  EdrmModel back = EdrmModel::FromCheckpoint(c, kg);
  Fixture f;
  for (const auto &inst : f.batch) {
    CHECK(back.Score(*inst.query_text, *inst.positive_text) ==
          model.Score(*inst.query_text, *inst.positive_text));
  }
  // A config for a different model is rejected.
  c.config += "dim=7\n";
  CHECK_THROWS(EdrmModel::FromCheckpoint(c, kg));
}

}  // namespace
}  // namespace edrm
