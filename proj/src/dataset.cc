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

#include "edrm/dataset.h"

#include <filesystem>

#include "edrm/evaluation.h"
#include "edrm/io.h"

namespace edrm {

namespace {

uint32_t MetaCount(const std::map<std::string, std::string> &meta,
                   const std::string &key) {
  auto it = meta.find(key);
  if (it == meta.end()) return 0;
  uint64_t v = 0;
  if (!ParseUint(it->second, &v) || v > UINT32_MAX) {
    throw ValidationError("meta " + key + ": bad count '" + it->second + "'");
  }
  return static_cast<uint32_t>(v);
}

std::string Join(const std::string &dir, const char *file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

uint32_t Dataset::word_vocab() const {
  return std::max(MetaCount(meta, "word_vocab"), kg.limits().word_vocab_size);
}

uint32_t Dataset::entity_vocab() const {
  return std::max(MetaCount(meta, "entity_vocab"),
                  static_cast<uint32_t>(kg.num_entities()));
}

uint32_t Dataset::type_vocab() const {
  return std::max(MetaCount(meta, "type_vocab"), kg.limits().type_vocab_size);
}

std::vector<QueryId> Dataset::Queries(SplitRole role,
                                      const std::string &stratum) const {
  std::vector<QueryId> out;
  for (const SplitEntry &e : split) {
    if (e.role == role && (stratum.empty() || e.stratum == stratum)) {
      out.push_back(e.query);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Dataset::StratumOf(QueryId query) const {
  for (const SplitEntry &e : split) {
    if (e.query == query) return e.stratum;
  }
  return "";
}

std::string SerializeMeta(const std::map<std::string, std::string> &meta) {
  std::string out;
  for (const auto &[k, v] : meta) out += k + "=" + v + "\n";
  return out;
}

std::map<std::string, std::string> ParseMeta(const std::string &path) {
  std::map<std::string, std::string> meta;
  ForEachLine(path, [&](size_t line, std::string_view row) {
    if (row.empty() || row[0] == '#') return;
    size_t eq = row.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(path, line, "expected key=value");
    }
    meta[std::string(row.substr(0, eq))] = std::string(row.substr(eq + 1));
  });
  return meta;
}

Dataset LoadDataset(const std::string &dir) {
  Dataset d;
  d.meta = ParseMeta(Join(dir, "meta.txt"));
  KgLimits limits{MetaCount(d.meta, "word_vocab"),
                  MetaCount(d.meta, "type_vocab")};
  d.kg = LoadKnowledgeGraph(Join(dir, "entities.tsv"),
                            Join(dir, "surface_forms.tsv"), limits);
  d.corpus.queries = LoadTexts(Join(dir, "queries.tsv"), &d.kg,
                               kMaxMentionLength);
  d.corpus.docs = LoadTexts(Join(dir, "docs.tsv"), &d.kg, kMaxMentionLength);
  d.clicks = LoadClicks(Join(dir, "clicks.tsv"));
  d.split = LoadSplit(Join(dir, "split.tsv"));
  for (const ClickRecord &r : d.clicks) {
    if (!d.corpus.queries.count(r.query) || !d.corpus.docs.count(r.doc)) {
      throw ValidationError("click record for unknown query " +
                            std::to_string(r.query) + " / doc " +
                            std::to_string(r.doc));
    }
  }
  for (const SplitEntry &e : d.split) {
    if (!d.corpus.queries.count(e.query)) {
      throw ValidationError("split names unknown query " +
                            std::to_string(e.query));
    }
  }
  return d;
}

std::vector<std::string> SaveDataset(const Dataset &d, const std::string &dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  auto put = [&](const char *file, const std::string &contents) {
    std::string path = Join(dir, file);
    WriteFileAtomic(path, contents);
    paths.push_back(path);
  };
  put("meta.txt", SerializeMeta(d.meta));
  put("entities.tsv", SerializeEntities(d.kg));
  put("surface_forms.tsv", SerializeSurfaceForms(d.kg));
  put("queries.tsv", SerializeTexts(d.corpus.queries, true));
  put("docs.tsv", SerializeTexts(d.corpus.docs, true));
  put("clicks.tsv", SerializeClicks(d.clicks));
  put("split.tsv", SerializeSplit(d.split));
  put("qrels.tsv", SerializeQrels(QrelsFromLabels(DctrLabels(d.clicks))));
  return paths;
}

}  // namespace edrm
