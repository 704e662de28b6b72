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

#include "edrm/analysis.h"

#include <cmath>

#include "edrm/io.h"
#include "edrm/model.h"

namespace edrm {

WeightReport KernelWeightAnalysis(std::span<const double> weights,
                                  const std::vector<BlockKind> &layout,
                                  const KernelBank &bank) {
  const size_t k = bank.size();
  if (weights.size() != layout.size() * k) {
    throw ValidationError("ranking layer has " +
                          std::to_string(weights.size()) +
                          " weights but the layout has " +
                          std::to_string(layout.size() * k) + " features");
  }
  double total = 0.0, exact = 0.0, solo = 0.0, in_space = 0.0;
  std::vector<double> blocks(layout.size(), 0.0);
  std::vector<double> kernels(k, 0.0);
  for (size_t b = 0; b < layout.size(); ++b) {
    for (size_t i = 0; i < k; ++i) {
      double w = std::abs(weights[b * k + i]);
      total += w;
      blocks[b] += w;
      kernels[i] += w;
      if (i == bank.exact_index()) exact += w;
      if (layout[b].WordOnly()) solo += w;
      if (layout[b].InSpace()) in_space += w;
    }
  }
  if (!(total > 0.0)) throw ValidationError("ranking weights are all zero");
  auto pct = [total](double v) { return 100.0 * v / total; };
  WeightReport r;
  r.exact = pct(exact);
  r.soft = pct(total - exact);
  r.solo_word = pct(solo);
  r.entity = pct(total - solo);
  r.in_space = pct(in_space);
  r.cross_space = pct(total - in_space);
  for (size_t b = 0; b < layout.size(); ++b) {
    r.blocks.emplace_back(layout[b].Label(), pct(blocks[b]));
  }
  for (double v : kernels) r.kernels.push_back(pct(v));
  return r;
}

WeightReport KernelWeightAnalysis(const Checkpoint &checkpoint) {
  ModelConfig config;
  config.Apply(checkpoint.config);
  if (!checkpoint.params.Has(params::kRankWeight)) {
    throw ValidationError("checkpoint has no ranking layer");
  }
  return KernelWeightAnalysis(
      checkpoint.params.Get(params::kRankWeight).value.values(),
      BuildLayout(config.ngram_count(), config.entity_channel()),
      config.kernels);
}

std::string WeightReport::Csv() const {
  std::string out = "group,share_pct\n";
  auto row = [&out](const std::string &name, double v) {
    out += name + "," + FormatDouble(v) + "\n";
  };
  row("exact", exact);
  row("soft", soft);
  row("solo_word", solo_word);
  row("entity", entity);
  row("in_space", in_space);
  row("cross_space", cross_space);
  for (const auto &[label, v] : blocks) row("block:" + label, v);
  for (size_t i = 0; i < kernels.size(); ++i) {
    row("kernel:" + std::to_string(i), kernels[i]);
  }
  return out;
}

std::string DifficultyBucket(double baseline_mrr) {
  if (baseline_mrr < kHardBelow) return "hard";
  if (baseline_mrr > kEasyAbove) return "easy";
  return "ordinary";
}

std::string LengthBucket(size_t words) {
  if (words <= 1) return "short";
  if (words <= 3) return "medium";
  return "long";
}

std::vector<BucketRow> BucketAnalysis(
    const MetricReport &mrr_a, const MetricReport &mrr_b, BucketKind kind,
    const std::map<QueryId, size_t> &query_lengths) {
  std::vector<BucketRow> rows;
  if (kind == BucketKind::kDifficulty) {
    rows = {{"hard"}, {"ordinary"}, {"easy"}};
  } else {
    rows = {{"short"}, {"medium"}, {"long"}};
  }
  auto find = [&rows](const std::string &name) -> BucketRow & {
    for (BucketRow &r : rows) {
      if (r.bucket == name) return r;
    }
    throw Error("unknown bucket " + name);
  };
  for (size_t i = 0; i < mrr_a.queries.size(); ++i) {
    QueryId q = mrr_a.queries[i];
    std::optional<double> b = mrr_b.Value(q);
    if (!b) continue;
    double a = mrr_a.values[i];
    std::string name;
    if (kind == BucketKind::kDifficulty) {
      name = DifficultyBucket(a);
    } else {
      auto it = query_lengths.find(q);
      if (it == query_lengths.end()) {
        throw ValidationError("no length for query " + std::to_string(q));
      }
      name = LengthBucket(it->second);
    }
    BucketRow &row = find(name);
    ++row.queries;
    if (*b > a) {
      ++row.wins;
    } else if (*b < a) {
      ++row.losses;
    } else {
      ++row.ties;
    }
    row.mrr_a += a;
    row.mrr_b += *b;
  }
  for (BucketRow &r : rows) {
    if (r.queries > 0) {
      r.mrr_a /= static_cast<double>(r.queries);
      r.mrr_b /= static_cast<double>(r.queries);
    }
  }
  return rows;
}

std::string BucketCsv(const std::vector<BucketRow> &rows) {
  std::string out = "bucket,queries,wins,ties,losses,mrr_a,mrr_b\n";
  for (const BucketRow &r : rows) {
    out += r.bucket + "," + std::to_string(r.queries) + "," +
           std::to_string(r.wins) + "," + std::to_string(r.ties) + "," +
           std::to_string(r.losses) + "," + FormatDouble(r.mrr_a) + "," +
           FormatDouble(r.mrr_b) + "\n";
  }
  return out;
}

double RandomMrr(size_t relevant, size_t n) {
  if (relevant == 0 || relevant > n) {
    throw ValidationError("random MRR needs 1 <= relevant <= n");
  }
  // P(first relevant at rank k) = prod_{i<k} (n - r - i + 1) / (n - i + 1)
  // times r / (n - k + 1).
  double expected = 0.0;
  double none_before = 1.0;
  const double r = static_cast<double>(relevant);
  for (size_t k = 1; k <= n - relevant + 1; ++k) {
    double remaining = static_cast<double>(n - k + 1);
    double hit = none_before * r / remaining;
    expected += hit / static_cast<double>(k);
    none_before *= (remaining - r) / remaining;
  }
  return expected;
}

}  // namespace edrm
