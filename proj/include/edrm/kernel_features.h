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

// Gaussian kernel pooling of translation matrices into soft-TF features.

#ifndef EDRM_KERNEL_FEATURES_H_
#define EDRM_KERNEL_FEATURES_H_

#include <span>
#include <string>
#include <vector>

#include "edrm/interaction.h"

namespace edrm {

// Guards log() of an empty soft-TF count.
inline constexpr double kLogEpsilon = 1e-10;

struct Kernel {
  double mu = 0.0;
  double sigma = 0.1;

  bool operator==(const Kernel &) const = default;
};

// K kernels with exactly one exact-match kernel at mu = 1.
class KernelBank {
 public:
  KernelBank() : KernelBank(Default()) {}
  explicit KernelBank(std::vector<Kernel> kernels);

  // K = 11: mu = 1.0 (sigma 0.001), then 0.9, 0.7, ..., -0.9 (sigma 0.1).
  static KernelBank Default();
  // The exact-match kernel followed by k - 1 soft kernels centred on
  // evenly spaced bins of [-1, 1). Evenly(11) == Default().
  static KernelBank Evenly(size_t k, double exact_sigma = 0.001,
                           double soft_sigma = 0.1);

  size_t size() const { return kernels_.size(); }
  const Kernel &operator[](size_t k) const { return kernels_[k]; }
  const std::vector<Kernel> &kernels() const { return kernels_; }
  size_t exact_index() const { return exact_; }

  // "mu:sigma,mu:sigma,..."
  std::string ToString() const;
  static KernelBank Parse(const std::string &text);

  bool operator==(const KernelBank &) const = default;

 private:
  std::vector<Kernel> kernels_;
  size_t exact_ = 0;
};

// feature_k = sum over rows i with a valid cell of
//   log(sum over valid j of exp(-(M_ij - mu_k)^2 / (2 sigma_k^2)) + eps).
std::vector<double> KernelPool(const TranslationMatrix &matrix,
                               const KernelBank &bank);

// Adds d(features)/d(M) . d_features into d_scores.
void KernelPoolBackward(const TranslationMatrix &matrix, const KernelBank &bank,
                        std::span<const double> d_features,
                        std::span<double> d_scores);

// Concatenated kernel features of every block, in layout order.
struct FeatureVector {
  std::vector<double> values;
  std::vector<BlockKind> layout;
  size_t kernels = 0;

  // "<block label>/k<index>"
  std::string ColumnLabel(size_t i) const;
};

// Throws if the matrices do not follow the layout.
FeatureVector BuildPhi(const std::vector<TranslationMatrix> &matrices,
                       const std::vector<BlockKind> &layout,
                       const KernelBank &bank);

std::string FeatureCsvHeader(const std::vector<BlockKind> &layout,
                             size_t kernels);
std::string FeatureCsvRow(QueryId query, DocId doc, const FeatureVector &phi);

}  // namespace edrm

#endif  // EDRM_KERNEL_FEATURES_H_
