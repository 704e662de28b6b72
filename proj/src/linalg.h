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

// Small dense kernels over row-major spans. Matrices are (out x in).

#ifndef EDRM_SRC_LINALG_H_
#define EDRM_SRC_LINALG_H_

#include <cmath>
#include <span>

namespace edrm::linalg {

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

inline double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

// y += alpha * x
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// y = W x (+ y when accumulate)
inline void MatVec(std::span<const double> w, size_t out, size_t in,
                   std::span<const double> x, std::span<double> y,
                   bool accumulate = false) {
  for (size_t r = 0; r < out; ++r) {
    double sum = accumulate ? y[r] : 0.0;
    const double *row = w.data() + r * in;
    for (size_t c = 0; c < in; ++c) sum += row[c] * x[c];
    y[r] = sum;
  }
}

// dx += W^T dy
inline void MatTVecAcc(std::span<const double> w, size_t out, size_t in,
                       std::span<const double> dy, std::span<double> dx) {
  for (size_t r = 0; r < out; ++r) {
    double g = dy[r];
    if (g == 0.0) continue;
    const double *row = w.data() + r * in;
    for (size_t c = 0; c < in; ++c) dx[c] += g * row[c];
  }
}

// dW += dy x^T
inline void OuterAcc(std::span<const double> dy, std::span<const double> x,
                     std::span<double> dw) {
  size_t in = x.size();
  for (size_t r = 0; r < dy.size(); ++r) {
    double g = dy[r];
    if (g == 0.0) continue;
    double *row = dw.data() + r * in;
    for (size_t c = 0; c < in; ++c) row[c] += g * x[c];
  }
}

}  // namespace edrm::linalg

#endif  // EDRM_SRC_LINALG_H_
