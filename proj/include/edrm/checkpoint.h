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

// Binary checkpoint format, all integers and floats little-endian:
//
//   "EDRMCKPT"                       8 bytes magic
//   u32 format version               currently 1
//   u32 L, u32 K                     embedding dim, kernel count
//   u32 word, entity, type vocab sizes
//   u32 n, n bytes                   model config as key=value lines
//   u32 parameter count
//   per parameter, in name order:
//     u32 n, n bytes name
//     u8 active
//     u32 rank, rank x u64 dims
//     product(dims) x f64 values
//
// Optimizer moments are not saved.

#ifndef EDRM_CHECKPOINT_H_
#define EDRM_CHECKPOINT_H_

#include <string>

#include "edrm/param_store.h"

namespace edrm {

struct CheckpointHeader {
  uint32_t version = 1;
  uint32_t dim = 0;
  uint32_t kernels = 0;
  uint32_t word_vocab = 0;
  uint32_t entity_vocab = 0;
  uint32_t type_vocab = 0;

  bool operator==(const CheckpointHeader &) const = default;
};

struct Checkpoint {
  CheckpointHeader header;
  std::string config;
  ParamStore params;
};

std::string SerializeCheckpoint(const Checkpoint &checkpoint);
Checkpoint ParseCheckpoint(const std::string &bytes);

void WriteCheckpoint(const std::string &path, const Checkpoint &checkpoint);
Checkpoint ReadCheckpoint(const std::string &path);

}  // namespace edrm

#endif  // EDRM_CHECKPOINT_H_
