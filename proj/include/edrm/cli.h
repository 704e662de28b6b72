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

// The edrm command line: generate, annotate, train, evaluate, analyze.
//
// Every command that writes files first writes a manifest.json describing
// the invocation, and rewrites it with output digests once the outputs are
// complete. Exit codes are 0 on success, 1 on runtime failure and 2 on
// usage errors.

#ifndef EDRM_CLI_H_
#define EDRM_CLI_H_

#include <map>
#include <string>
#include <vector>

namespace edrm {

inline constexpr char kToolVersion[] = "edrm 1.0.0";

struct RunManifest {
  std::string command;
  uint64_t seed = 0;
  // Effective configuration, as text.
  std::string config;
  // Input path to SHA-256 hex digest.
  std::map<std::string, std::string> inputs;
  // Output paths, relative to the manifest's directory where possible.
  std::vector<std::string> outputs;
  // Filled in by Finish(); empty while outputs are being written.
  std::map<std::string, std::string> output_digests;
  std::string version = kToolVersion;

  void AddInput(const std::string &path);
  std::string ToJson() const;
  static RunManifest FromJson(const std::string &text);
};

// Writes the manifest atomically at path.
void WriteManifest(const std::string &path, const RunManifest &manifest);
// Digests every output (resolved against the manifest's directory) and
// rewrites the manifest.
void FinishManifest(const std::string &path, RunManifest &manifest);

// Entry point shared by the binary and the tests. Reports go to stdout,
// progress and errors to stderr.
int RunCli(int argc, const char *const *argv);

}  // namespace edrm

#endif  // EDRM_CLI_H_
