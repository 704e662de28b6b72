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

#ifndef EDRM_TENSOR_H_
#define EDRM_TENSOR_H_

#include <cmath>
#include <span>
#include <vector>

#include "edrm/common.h"

namespace edrm {

// Dense row-major double tensor. Rank 1 tensors are treated as a single
// row for row access.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape);
  Tensor(std::vector<size_t> shape, std::vector<double> values);

  const std::vector<size_t> &shape() const { return shape_; }
  size_t size() const { return values_.size(); }
  size_t rank() const { return shape_.size(); }

  // First dimension and the product of the rest.
  size_t rows() const;
  size_t cols() const;

  double &operator[](size_t i) { return values_[i]; }
  double operator[](size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> row(size_t r) {
    return std::span<double>(values_).subspan(r * cols(), cols());
  }
  std::span<const double> row(size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }

  void Fill(double value);
  bool AllFinite() const;

  bool operator==(const Tensor &) const = default;

 private:
  std::vector<size_t> shape_;
  std::vector<double> values_;
};

size_t ShapeSize(const std::vector<size_t> &shape);
std::string ShapeString(const std::vector<size_t> &shape);

}  // namespace edrm

#endif  // EDRM_TENSOR_H_
