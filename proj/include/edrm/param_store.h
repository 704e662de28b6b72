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

#ifndef EDRM_PARAM_STORE_H_
#define EDRM_PARAM_STORE_H_

#include <span>
#include <string>
#include <vector>

#include "edrm/tensor.h"

namespace edrm {

// A trainable tensor with its gradient and Adam moments. Inactive
// parameters are frozen: they keep their value and never receive updates.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor first_moment;
  Tensor second_moment;
  uint64_t step = 0;
  bool active = true;
};

// Named parameters kept in lexicographic name order. Indices are stable
// once all parameters have been added.
class ParamStore {
 public:
  // Throws if the name already exists.
  Param &Add(const std::string &name, Tensor value, bool active = true);

  bool Has(const std::string &name) const;
  size_t Index(const std::string &name) const;
  Param &Get(const std::string &name) { return params_[Index(name)]; }
  const Param &Get(const std::string &name) const {
    return params_[Index(name)];
  }

  size_t size() const { return params_.size(); }
  Param &operator[](size_t i) { return params_[i]; }
  const Param &operator[](size_t i) const { return params_[i]; }
  std::vector<Param> &params() { return params_; }
  const std::vector<Param> &params() const { return params_; }

  size_t TotalValues() const;
  void ZeroGrad();

 private:
  std::vector<Param> params_;
};

// Gradient scratch space aligned with a ParamStore. Workers accumulate into
// private buffers which are merged in a fixed order.
class GradBuffer {
 public:
  GradBuffer() = default;
  explicit GradBuffer(const ParamStore &store);

  std::span<double> operator[](size_t param) { return grads_[param]; }
  std::span<const double> operator[](size_t param) const {
    return grads_[param];
  }
  size_t size() const { return grads_.size(); }

  void Zero();
  void Add(const GradBuffer &other);
  // Adds into Param::grad.
  void AccumulateInto(ParamStore &store) const;

 private:
  std::vector<std::vector<double>> grads_;
};

}  // namespace edrm

#endif  // EDRM_PARAM_STORE_H_
