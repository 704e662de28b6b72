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

#ifndef EDRM_RNG_H_
#define EDRM_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace edrm {

using Rng = std::mt19937_64;

// Every consumer of randomness draws from its own stream keyed by
// (seed, name), so adding a consumer never shifts another's draws.
// Stream names in use: "init/<param>", "train/shuffle/<epoch>",
// "train/valid-split", "permutation", "generate/<part>", "gradcheck".
inline Rng NamedStream(uint64_t seed, std::string_view name) {
  std::vector<uint32_t> material;
  material.push_back(static_cast<uint32_t>(seed));
  material.push_back(static_cast<uint32_t>(seed >> 32));
  for (char c : name) material.push_back(static_cast<unsigned char>(c));
  std::seed_seq seq(material.begin(), material.end());
  return Rng(seq);
}

// Uniform on [lo, hi). Written out rather than using
// std::uniform_real_distribution so draws are identical across standard
// libraries.
inline double UniformReal(Rng &rng, double lo, double hi) {
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

// Uniform integer in [0, n). n must be positive.
inline uint64_t UniformInt(Rng &rng, uint64_t n) {
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Fisher-Yates with UniformInt, for the same portability reason.
template <typename T>
void Shuffle(std::vector<T> &items, Rng &rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = UniformInt(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace edrm

#endif  // EDRM_RNG_H_
