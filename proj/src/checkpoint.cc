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

#include "edrm/checkpoint.h"

#include <bit>
#include <cstring>

#include "edrm/io.h"

namespace edrm {

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'E', 'D', 'R', 'M', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void PutString(const std::string &s) {
    Put<uint32_t>(static_cast<uint32_t>(s.size()));
    out_ += s;
  }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string GetString() {
    uint32_t n = Get<uint32_t>();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("checkpoint truncated");
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string &bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Checkpoint &checkpoint) {
  Writer w;
  for (char c : kMagic) w.Put<char>(c);
  const CheckpointHeader &h = checkpoint.header;
  w.Put<uint32_t>(kVersion);
  w.Put<uint32_t>(h.dim);
  w.Put<uint32_t>(h.kernels);
  w.Put<uint32_t>(h.word_vocab);
  w.Put<uint32_t>(h.entity_vocab);
  w.Put<uint32_t>(h.type_vocab);
  w.PutString(checkpoint.config);
  w.Put<uint32_t>(static_cast<uint32_t>(checkpoint.params.size()));
  for (const Param &p : checkpoint.params.params()) {
    w.PutString(p.name);
    w.Put<uint8_t>(p.active ? 1 : 0);
    w.Put<uint32_t>(static_cast<uint32_t>(p.value.rank()));
    for (size_t d : p.value.shape()) w.Put<uint64_t>(d);
    for (double v : p.value.values()) w.Put<double>(v);
  }
  return w.Take();
}

Checkpoint ParseCheckpoint(const std::string &bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.Get<char>() != c) throw Error("not an EDRM checkpoint");
  }
  Checkpoint checkpoint;
  CheckpointHeader &h = checkpoint.header;
  h.version = r.Get<uint32_t>();
  if (h.version != kVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(h.version));
  }
  h.dim = r.Get<uint32_t>();
  h.kernels = r.Get<uint32_t>();
  h.word_vocab = r.Get<uint32_t>();
  h.entity_vocab = r.Get<uint32_t>();
  h.type_vocab = r.Get<uint32_t>();
  checkpoint.config = r.GetString();
  uint32_t count = r.Get<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = r.GetString();
    bool active = r.Get<uint8_t>() != 0;
    uint32_t rank = r.Get<uint32_t>();
    std::vector<size_t> shape(rank);
    for (auto &d : shape) d = static_cast<size_t>(r.Get<uint64_t>());
    size_t n = ShapeSize(shape);
    r.Need(n * sizeof(double));
    std::vector<double> values(n);
    for (auto &v : values) v = r.Get<double>();
    checkpoint.params.Add(name, Tensor(std::move(shape), std::move(values)),
                          active);
  }
  if (!r.AtEnd()) throw Error("trailing bytes after checkpoint");
  return checkpoint;
}

void WriteCheckpoint(const std::string &path, const Checkpoint &checkpoint) {
  WriteFileAtomic(path, SerializeCheckpoint(checkpoint));
}

Checkpoint ReadCheckpoint(const std::string &path) {
  return ParseCheckpoint(ReadFile(path));
}

}  // namespace edrm
