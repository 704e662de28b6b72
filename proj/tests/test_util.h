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

// Small hand-built fixtures shared by the unit tests.

#ifndef EDRM_TESTS_TEST_UTIL_H_
#define EDRM_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "edrm/knowledge_store.h"
#include "edrm/param_store.h"
#include "edrm/rng.h"

namespace edrm::testing {

// Words 0..29, types 0..3. Entity 0 "apple inc" (types 0,1), entity 1
// "apple" fruit (type 2), entity 2 "jobs" (type 0), entity 3 "orchard"
// (type 2, no description), entity 4 "ceo" (no types).
inline KnowledgeGraph ToyKg() {
  std::vector<Entity> entities = {
      {0, {1, 2}, {10, 11, 12, 13}, {0, 1}},
      {1, {1}, {14, 15}, {2}},
      {2, {3}, {16, 17, 18}, {0}},
      {3, {4}, {}, {2}},
      {4, {5}, {19}, {}},
  };
  SurfaceFormTable forms;
  forms.Add({1, 2}, 0, 1.0);
  forms.Add({1}, 0, 0.6);
  forms.Add({1}, 1, 0.4);
  forms.Add({3}, 2, 1.0);
  forms.Add({4}, 3, 1.0);
  forms.Add({5}, 4, 0.9);
  forms.Finalize();
  return KnowledgeGraph(std::move(entities), std::move(forms), {30, 4});
}

inline DuetText Text(TokenSeq words, std::vector<Mention> mentions = {}) {
  return DuetText{std::move(words), std::move(mentions)};
}

// Overwrites every parameter with uniform(-limit, limit) values.
inline void Randomize(ParamStore &store, double limit, uint64_t seed) {
  Rng rng = NamedStream(seed, "test/randomize");
  for (Param &p : store.params()) {
    std::vector<double> values(p.value.size());
    for (double &v : values) v = UniformReal(rng, -limit, limit);
    p.value = Tensor(p.value.shape(), std::move(values));
  }
}

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("edrm_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string File(const std::string &name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace edrm::testing

#endif  // EDRM_TESTS_TEST_UTIL_H_
