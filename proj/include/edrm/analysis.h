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

// Where the ranking layer puts its weight, and how two runs compare across
// query difficulty and length buckets.

#ifndef EDRM_ANALYSIS_H_
#define EDRM_ANALYSIS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "edrm/checkpoint.h"
#include "edrm/evaluation.h"
#include "edrm/kernel_features.h"

namespace edrm {

// Percentages of total |w_r| mass. Each pair of groups sums to 100.
struct WeightReport {
  double exact = 0.0;
  double soft = 0.0;
  double solo_word = 0.0;
  double entity = 0.0;
  double in_space = 0.0;
  double cross_space = 0.0;
  // Per block label, in layout order.
  std::vector<std::pair<std::string, double>> blocks;
  // Per kernel index.
  std::vector<double> kernels;

  std::string Csv() const;
};

WeightReport KernelWeightAnalysis(std::span<const double> weights,
                                  const std::vector<BlockKind> &layout,
                                  const KernelBank &bank);
// Rebuilds the layout from the checkpoint's config.
WeightReport KernelWeightAnalysis(const Checkpoint &checkpoint);

enum class BucketKind { kDifficulty, kLength };

inline constexpr double kHardBelow = 0.167;
inline constexpr double kEasyAbove = 0.382;

struct BucketRow {
  std::string bucket;
  size_t queries = 0;
  size_t wins = 0;
  size_t ties = 0;
  size_t losses = 0;
  double mrr_a = 0.0;
  double mrr_b = 0.0;
};

// "hard" / "ordinary" / "easy" for a baseline MRR.
std::string DifficultyBucket(double baseline_mrr);
// "short" (1 word) / "medium" (2-3) / "long" (4+).
std::string LengthBucket(size_t words);

// Win/tie/loss of b against a per bucket, over queries evaluated in both.
// Difficulty uses a's per-query MRR; length needs query_lengths.
std::vector<BucketRow> BucketAnalysis(
    const MetricReport &mrr_a, const MetricReport &mrr_b, BucketKind kind,
    const std::map<QueryId, size_t> &query_lengths = {});

std::string BucketCsv(const std::vector<BucketRow> &rows);

// Expected reciprocal rank of the first of r relevant documents when n
// documents are ordered uniformly at random.
double RandomMrr(size_t relevant, size_t n);

}  // namespace edrm

#endif  // EDRM_ANALYSIS_H_
