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

// Line-oriented TSV helpers shared by every file format in the project.

#ifndef EDRM_IO_H_
#define EDRM_IO_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "edrm/common.h"

namespace edrm {

// Splits on a single character. Empty input yields one empty field.
std::vector<std::string_view> Split(std::string_view text, char sep);

// Parses a base-10 unsigned integer; the whole field must be consumed.
bool ParseUint(std::string_view text, uint64_t *value);
bool ParseDouble(std::string_view text, double *value);

// Space-separated id list. Empty text is an empty list.
bool ParseIdList(std::string_view text, char sep, std::vector<uint32_t> *ids);
std::string JoinIds(const std::vector<uint32_t> &ids, char sep);

// Shortest decimal that round-trips to the same double.
std::string FormatDouble(double value);

// Calls fn(line_number, line) for every line. Line numbers are 1-based.
// Trailing '\r' is not stripped: files must use '\n' endings.
void ForEachLine(const std::string &path,
                 const std::function<void(size_t, std::string_view)> &fn);

std::string ReadFile(const std::string &path);

// Writes to a temporary sibling then renames over the target.
void WriteFileAtomic(const std::string &path, std::string_view contents);

// Lower-case hex SHA-256 of a file's bytes.
std::string Sha256File(const std::string &path);
std::string Sha256Hex(std::string_view bytes);

}  // namespace edrm

#endif  // EDRM_IO_H_
