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

#ifndef EDRM_COMMON_H_
#define EDRM_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace edrm {

using WordId = uint32_t;
using EntityId = uint32_t;
using TypeId = uint32_t;
using QueryId = uint32_t;
using DocId = uint32_t;

using TokenSeq = std::vector<WordId>;

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string &path, size_t line, const std::string &what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(path), line_(line) {}

  const std::string &path() const { return path_; }
  size_t line() const { return line_; }

 private:
  std::string path_;
  size_t line_;
};

// Well-formed input that violates a cross-reference or value invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace edrm

#endif  // EDRM_COMMON_H_
