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

#include "edrm/kernel_features.h"

#include <cmath>

#include "doctest.h"
#include "edrm/grad_check.h"
#include "test_util.h"

namespace edrm {
namespace {

TranslationMatrix Matrix(size_t rows, size_t cols, std::vector<double> scores,
                         std::vector<uint8_t> valid = {}) {
  TranslationMatrix m;
  m.kind = BuildLayout(1, false)[0];
  m.rows = rows;
  m.cols = cols;
  m.scores = std::move(scores);
  m.valid = valid.empty() ? std::vector<uint8_t>(rows * cols, 1) : std::move(valid);
  return m;
}

// Triple loop over kernels, rows and columns.
std::vector<double> OraclePool(const TranslationMatrix &m, const KernelBank &bank) {
  std::vector<double> out(bank.size(), 0.0);
  for (size_t k = 0; k < bank.size(); ++k) {
    double mu = bank[k].mu, sigma = bank[k].sigma;
    for (size_t i = 0; i < m.rows; ++i) {
      double tf = 0.0;
      bool any = false;
      for (size_t j = 0; j < m.cols; ++j) {
        if (!m.valid[i * m.cols + j]) continue;
        any = true;
        double x = m.scores[i * m.cols + j] - mu;
        tf += std::exp(-x * x / (2 * sigma * sigma));
      }
      if (any) out[k] += std::log(tf + 1e-10);
    }
  }
  return out;
}

TranslationMatrix RandomMatrix(Rng &rng, size_t rows, size_t cols) {
  std::vector<double> s(rows * cols);
  std::vector<uint8_t> v(rows * cols);
  for (size_t i = 0; i < s.size(); ++i) {
    s[i] = UniformReal(rng, -1, 1);
    v[i] = UniformInt(rng, 5) != 0;
  }
  return Matrix(rows, cols, s, v);
}

TEST_CASE("default bank") {
  KernelBank bank = KernelBank::Default();
  REQUIRE(bank.size() == 11);
  CHECK(bank[0] == Kernel{1.0, 0.001});
  CHECK(bank.exact_index() == 0);
  double mus[] = {1.0, 0.9, 0.7, 0.5, 0.3, 0.1, -0.1, -0.3, -0.5, -0.7, -0.9};
  for (size_t k = 0; k < 11; ++k) {
    CHECK(bank[k].mu == doctest::Approx(mus[k]).epsilon(1e-12));
    if (k > 0) CHECK(bank[k].sigma == 0.1);
  }
  CHECK(KernelBank::Evenly(11) == bank);
  CHECK(KernelBank::Parse(bank.ToString()) == bank);
  CHECK(KernelBank::Evenly(5).size() == 5);
}

TEST_CASE("bank validation") {
  CHECK_THROWS_AS(KernelBank(std::vector<Kernel>{}), ValidationError);
  CHECK_THROWS_AS(KernelBank({{0.5, 0.1}}), ValidationError);
  CHECK_THROWS_AS(KernelBank({{1.0, 0.001}, {1.0, 0.001}}), ValidationError);
  CHECK_THROWS_AS(KernelBank({{1.0, 0.001}, {0.0, -0.1}}), ValidationError);
  CHECK_THROWS_AS(KernelBank::Parse("1:0.001,x"), ValidationError);
}

TEST_CASE("hand values") {
  KernelBank single({{1.0, 0.1}});
  CHECK(KernelPool(Matrix(1, 1, {1.0}), single)[0] ==
        doctest::Approx(std::log(1.0 + 1e-10)).epsilon(1e-15));
  CHECK(KernelPool(Matrix(1, 2, {1.0, 1.0}), single)[0] ==
        doctest::Approx(std::log(2.0 + 1e-10)).epsilon(1e-15));
  // Fully masked rows and matrices contribute nothing.
  auto masked = KernelPool(Matrix(2, 2, {1, 1, 1, 1}, {1, 1, 0, 0}), single);
  CHECK(masked[0] == doctest::Approx(std::log(2.0 + 1e-10)));
  auto empty = KernelPool(Matrix(0, 3, {}), KernelBank::Default());
  for (double f : empty) CHECK(f == 0.0);
  auto none = KernelPool(Matrix(2, 2, {1, 1, 1, 1}, {0, 0, 0, 0}), single);
  CHECK(none[0] == 0.0);
}

TEST_CASE("random matrices match the triple loop") {
  Rng rng = NamedStream(1, "test/pool");
  KernelBank bank = KernelBank::Default();
  for (int t = 0; t < 200; ++t) {
    TranslationMatrix m = RandomMatrix(rng, 1 + UniformInt(rng, 8), 1 + UniformInt(rng, 16));
    auto got = KernelPool(m, bank);
    auto want = OraclePool(m, bank);
    for (size_t k = 0; k < bank.size(); ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-10);
  }
}

TEST_CASE("pooling is invariant to row and column order") {
  Rng rng = NamedStream(2, "test/perm");
  KernelBank bank = KernelBank::Default();
  for (int t = 0; t < 50; ++t) {
    size_t r = 1 + UniformInt(rng, 6), c = 1 + UniformInt(rng, 8);
    TranslationMatrix m = RandomMatrix(rng, r, c);
    std::vector<size_t> rp(r), cp(c);
    for (size_t i = 0; i < r; ++i) rp[i] = i;
    for (size_t j = 0; j < c; ++j) cp[j] = j;
    Shuffle(rp, rng);
    Shuffle(cp, rng);
    TranslationMatrix p = m;
    for (size_t i = 0; i < r; ++i) {
      for (size_t j = 0; j < c; ++j) {
        p.scores[i * c + j] = m.scores[rp[i] * c + cp[j]];
        p.valid[i * c + j] = m.valid[rp[i] * c + cp[j]];
      }
    }
    auto a = KernelPool(m, bank), b = KernelPool(p, bank);
    for (size_t k = 0; k < bank.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
  }
}

TEST_CASE("exact kernel is monotone toward one") {
  Rng rng = NamedStream(3, "test/mono");
  KernelBank bank = KernelBank::Default();
  for (int t = 0; t < 100; ++t) {
    TranslationMatrix m = RandomMatrix(rng, 3, 4);
    for (double &s : m.scores) s = UniformReal(rng, 0.995, 1.0);
    size_t cell = UniformInt(rng, 12);
    m.valid[cell] = 1;
    double before = KernelPool(m, bank)[bank.exact_index()];
    m.scores[cell] += (1.0 - m.scores[cell]) * UniformReal(rng, 0.0, 1.0);
    double after = KernelPool(m, bank)[bank.exact_index()];
    CHECK(after >= before);
  }
}

TEST_CASE("pooling gradient") {
  Rng rng = NamedStream(4, "test/poolgrad");
  KernelBank bank = KernelBank::Evenly(5, 0.05, 0.2);
  TranslationMatrix base = RandomMatrix(rng, 3, 5);
  std::vector<double> r(bank.size());
  for (double &x : r) x = UniformReal(rng, -1, 1);
  ParamStore store;
  store.Add("m", Tensor({3, 5}, base.scores));
  LossGradFn fn = [&](const ParamStore &s, GradBuffer *g) {
    TranslationMatrix m = base;
    auto v = s[0].value.values();
    m.scores.assign(v.begin(), v.end());
    auto f = KernelPool(m, bank);
    double loss = 0.0;
    for (size_t k = 0; k < f.size(); ++k) loss += r[k] * f[k];
    if (g != nullptr) KernelPoolBackward(m, bank, r, (*g)[0]);
    return loss;
  };
  GradCheckOptions options;
  options.step = 1e-6;
  GradCheckReport report = GradCheck(fn, store, options);
  INFO(report.Summary());
  CHECK(report.pass);
}

TEST_CASE("phi layout and masking") {
  Rng rng = NamedStream(5, "test/phi");
  KernelBank bank = KernelBank::Default();
  for (auto [h, expect] : {std::pair{1, 44}, std::pair{3, 176}}) {
    auto layout = BuildLayout(h, true);
    std::vector<TranslationMatrix> ms;
    for (const BlockKind &kind : layout) {
      TranslationMatrix m = kind.query.entity ? Matrix(0, 4, {}) : RandomMatrix(rng, 2, 3);
      m.kind = kind;
      ms.push_back(m);
    }
    FeatureVector phi = BuildPhi(ms, layout, bank);
    CHECK(phi.values.size() == static_cast<size_t>(expect));
    for (size_t b = 0; b < layout.size(); ++b) {
      auto want = KernelPool(ms[b], bank);
      for (size_t k = 0; k < 11; ++k) {
        CHECK(phi.values[b * 11 + k] == want[k]);
        if (layout[b].query.entity) CHECK(phi.values[b * 11 + k] == 0.0);
      }
    }
    CHECK(phi.ColumnLabel(0) == "w1-w1/k0");
    std::string header = FeatureCsvHeader(layout, 11);
    CHECK(header.rfind("query_id,doc_id,w1-w1/k0,", 0) == 0);
    std::string row = FeatureCsvRow(3, 4, phi);
    CHECK(row.rfind("3,4,", 0) == 0);
    // Matrices out of layout order are rejected.
    std::swap(ms[0], ms.back());
    CHECK_THROWS_AS(BuildPhi(ms, layout, bank), Error);
  }
}

}  // namespace
}  // namespace edrm
