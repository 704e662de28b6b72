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

#include "edrm/param_store.h"

#include <algorithm>

namespace edrm {

Param &ParamStore::Add(const std::string &name, Tensor value, bool active) {
  auto it = std::lower_bound(
      params_.begin(), params_.end(), name,
      [](const Param &p, const std::string &n) { return p.name < n; });
  if (it != params_.end() && it->name == name) {
    throw Error("duplicate parameter " + name);
  }
  if (!value.AllFinite()) throw Error("parameter " + name + " is not finite");
  Param p;
  p.name = name;
  p.grad = Tensor(value.shape());
  p.first_moment = Tensor(value.shape());
  p.second_moment = Tensor(value.shape());
  p.value = std::move(value);
  p.active = active;
  return *params_.insert(it, std::move(p));
}

bool ParamStore::Has(const std::string &name) const {
  auto it = std::lower_bound(
      params_.begin(), params_.end(), name,
      [](const Param &p, const std::string &n) { return p.name < n; });
  return it != params_.end() && it->name == name;
}

size_t ParamStore::Index(const std::string &name) const {
  auto it = std::lower_bound(
      params_.begin(), params_.end(), name,
      [](const Param &p, const std::string &n) { return p.name < n; });
  if (it == params_.end() || it->name != name) {
    throw Error("unknown parameter " + name);
  }
  return static_cast<size_t>(it - params_.begin());
}

size_t ParamStore::TotalValues() const {
  size_t n = 0;
  for (const Param &p : params_) n += p.value.size();
  return n;
}

void ParamStore::ZeroGrad() {
  for (Param &p : params_) p.grad.Fill(0.0);
}

GradBuffer::GradBuffer(const ParamStore &store) {
  grads_.reserve(store.size());
  for (const Param &p : store.params()) {
    grads_.emplace_back(p.value.size(), 0.0);
  }
}

void GradBuffer::Zero() {
  for (auto &g : grads_) std::fill(g.begin(), g.end(), 0.0);
}

void GradBuffer::Add(const GradBuffer &other) {
  for (size_t p = 0; p < grads_.size(); ++p) {
    auto &dst = grads_[p];
    const auto &src = other.grads_[p];
    for (size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
}

void GradBuffer::AccumulateInto(ParamStore &store) const {
  for (size_t p = 0; p < grads_.size(); ++p) {
    auto values = store[p].grad.values();
    for (size_t i = 0; i < values.size(); ++i) values[i] += grads_[p][i];
  }
}

}  // namespace edrm
