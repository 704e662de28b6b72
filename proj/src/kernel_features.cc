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

#include "edrm/io.h"

namespace edrm {

KernelBank::KernelBank(std::vector<Kernel> kernels)
    : kernels_(std::move(kernels)) {
  if (kernels_.empty()) throw ValidationError("kernel bank is empty");
  size_t exact_count = 0;
  for (size_t k = 0; k < kernels_.size(); ++k) {
    const Kernel &kernel = kernels_[k];
    if (!(kernel.sigma > 0.0) || !std::isfinite(kernel.sigma)) {
      throw ValidationError("kernel " + std::to_string(k) +
                            ": width must be positive");
    }
    if (!(kernel.mu >= -1.0 && kernel.mu <= 1.0)) {
      throw ValidationError("kernel " + std::to_string(k) +
                            ": mean outside [-1, 1]");
    }
    if (kernel.mu == 1.0) {
      exact_ = k;
      ++exact_count;
    }
  }
  if (exact_count != 1) {
    throw ValidationError("kernel bank needs exactly one kernel at mu = 1");
  }
}

KernelBank KernelBank::Default() { return Evenly(11); }

KernelBank KernelBank::Evenly(size_t k, double exact_sigma,
                              double soft_sigma) {
  if (k == 0) throw ValidationError("kernel bank is empty");
  std::vector<Kernel> kernels;
  kernels.push_back({1.0, exact_sigma});
  size_t soft = k - 1;
  for (size_t i = 0; i < soft; ++i) {
    // Bin centres of [-1, 1) split into `soft` equal bins, high to low.
    // One rounding from exact integers, so Evenly(11) hits 0.9, 0.7, ...
    double mu = (static_cast<double>(soft) - 2.0 * static_cast<double>(i) -
                 1.0) /
                static_cast<double>(soft);
    kernels.push_back({mu, soft_sigma});
  }
  return KernelBank(std::move(kernels));
}

std::string KernelBank::ToString() const {
  std::string out;
  for (size_t k = 0; k < kernels_.size(); ++k) {
    if (k > 0) out += ',';
    out += FormatDouble(kernels_[k].mu) + ":" + FormatDouble(kernels_[k].sigma);
  }
  return out;
}

KernelBank KernelBank::Parse(const std::string &text) {
  std::vector<Kernel> kernels;
  for (std::string_view item : Split(text, ',')) {
    auto parts = Split(item, ':');
    Kernel kernel;
    if (parts.size() != 2 || !ParseDouble(parts[0], &kernel.mu) ||
        !ParseDouble(parts[1], &kernel.sigma)) {
      throw ValidationError("bad kernel spec '" + std::string(item) + "'");
    }
    kernels.push_back(kernel);
  }
  return KernelBank(std::move(kernels));
}

std::vector<double> KernelPool(const TranslationMatrix &matrix,
                               const KernelBank &bank) {
  std::vector<double> features(bank.size(), 0.0);
  std::vector<double> soft(bank.size());
  for (size_t i = 0; i < matrix.rows; ++i) {
    bool any = false;
    std::fill(soft.begin(), soft.end(), 0.0);
    for (size_t j = 0; j < matrix.cols; ++j) {
      if (!matrix.is_valid(i, j)) continue;
      any = true;
      double m = matrix.at(i, j);
      for (size_t k = 0; k < bank.size(); ++k) {
        double diff = m - bank[k].mu;
        soft[k] += std::exp(-diff * diff / (2.0 * bank[k].sigma * bank[k].sigma));
      }
    }
    if (!any) continue;
    for (size_t k = 0; k < bank.size(); ++k) {
      features[k] += std::log(soft[k] + kLogEpsilon);
    }
  }
  return features;
}

void KernelPoolBackward(const TranslationMatrix &matrix, const KernelBank &bank,
                        std::span<const double> d_features,
                        std::span<double> d_scores) {
  std::vector<double> soft(bank.size());
  for (size_t i = 0; i < matrix.rows; ++i) {
    bool any = false;
    std::fill(soft.begin(), soft.end(), 0.0);
    for (size_t j = 0; j < matrix.cols; ++j) {
      if (!matrix.is_valid(i, j)) continue;
      any = true;
      double m = matrix.at(i, j);
      for (size_t k = 0; k < bank.size(); ++k) {
        double diff = m - bank[k].mu;
        soft[k] += std::exp(-diff * diff / (2.0 * bank[k].sigma * bank[k].sigma));
      }
    }
    if (!any) continue;
    for (size_t j = 0; j < matrix.cols; ++j) {
      if (!matrix.is_valid(i, j)) continue;
      double m = matrix.at(i, j);
      double g = 0.0;
      for (size_t k = 0; k < bank.size(); ++k) {
        double var = bank[k].sigma * bank[k].sigma;
        double diff = m - bank[k].mu;
        double e = std::exp(-diff * diff / (2.0 * var));
        g += d_features[k] / (soft[k] + kLogEpsilon) * e * (-diff / var);
      }
      d_scores[i * matrix.cols + j] += g;
    }
  }
}

std::string FeatureVector::ColumnLabel(size_t i) const {
  return layout[i / kernels].Label() + "/k" + std::to_string(i % kernels);
}

FeatureVector BuildPhi(const std::vector<TranslationMatrix> &matrices,
                       const std::vector<BlockKind> &layout,
                       const KernelBank &bank) {
  if (matrices.size() != layout.size()) {
    throw Error("feature layout expects " + std::to_string(layout.size()) +
                " matrices, got " + std::to_string(matrices.size()));
  }
  FeatureVector phi;
  phi.layout = layout;
  phi.kernels = bank.size();
  phi.values.reserve(layout.size() * bank.size());
  for (size_t b = 0; b < layout.size(); ++b) {
    if (!(matrices[b].kind == layout[b])) {
      throw Error("feature layout mismatch at block " + std::to_string(b) +
                  ": expected " + layout[b].Label() + ", got " +
                  matrices[b].kind.Label());
    }
    std::vector<double> f = KernelPool(matrices[b], bank);
    phi.values.insert(phi.values.end(), f.begin(), f.end());
  }
  return phi;
}

std::string FeatureCsvHeader(const std::vector<BlockKind> &layout,
                             size_t kernels) {
  std::string out = "query_id,doc_id";
  for (const BlockKind &b : layout) {
    for (size_t k = 0; k < kernels; ++k) {
      out += "," + b.Label() + "/k" + std::to_string(k);
    }
  }
  return out + "\n";
}

std::string FeatureCsvRow(QueryId query, DocId doc, const FeatureVector &phi) {
  std::string out = std::to_string(query) + "," + std::to_string(doc);
  for (double v : phi.values) out += "," + FormatDouble(v);
  return out + "\n";
}

}  // namespace edrm
