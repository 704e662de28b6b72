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

#include "edrm/corpus.h"

#include <algorithm>

#include "edrm/io.h"

namespace edrm {

const DuetText &CorpusStore::query(QueryId id) const {
  auto it = queries.find(id);
  if (it == queries.end()) throw Error("unknown query " + std::to_string(id));
  return it->second;
}

const DuetText &CorpusStore::doc(DocId id) const {
  auto it = docs.find(id);
  if (it == docs.end()) throw Error("unknown document " + std::to_string(id));
  return it->second;
}

std::vector<LabeledPair> DctrLabels(const std::vector<ClickRecord> &records) {
  std::map<std::pair<QueryId, DocId>, std::pair<uint64_t, uint64_t>> totals;
  for (const ClickRecord &r : records) {
    if (r.impressions == 0) {
      throw ValidationError("query " + std::to_string(r.query) + " doc " +
                            std::to_string(r.doc) + ": zero impressions");
    }
    if (r.clicks > r.impressions) {
      throw ValidationError("query " + std::to_string(r.query) + " doc " +
                            std::to_string(r.doc) +
                            ": more clicks than impressions");
    }
    auto &[clicks, impressions] = totals[{r.query, r.doc}];
    clicks += r.clicks;
    impressions += r.impressions;
  }
  std::vector<LabeledPair> labels;
  labels.reserve(totals.size());
  for (const auto &[key, counts] : totals) {
    labels.push_back({key.first, key.second,
                      static_cast<double>(counts.first) /
                          static_cast<double>(counts.second)});
  }
  return labels;
}

std::vector<PairwiseInstance> MakePairs(const std::vector<LabeledPair> &labels,
                                        const CorpusStore &texts,
                                        size_t max_pairs_per_query,
                                        PairStats *stats) {
  std::map<QueryId, std::vector<std::pair<DocId, double>>> by_query;
  for (const LabeledPair &l : labels) {
    by_query[l.query].emplace_back(l.doc, l.grade);
  }
  PairStats local;
  std::vector<PairwiseInstance> pairs;
  for (auto &[query, docs] : by_query) {
    if (docs.size() < 2) {
      ++local.skipped_queries;
      continue;
    }
    std::sort(docs.begin(), docs.end());
    const DuetText &q = texts.query(query);
    size_t emitted = 0;
    for (const auto &[pos, pos_grade] : docs) {
      for (const auto &[neg, neg_grade] : docs) {
        if (!(pos_grade > neg_grade)) continue;
        if (max_pairs_per_query > 0 && emitted >= max_pairs_per_query) break;
        pairs.push_back({query, pos, neg, &q, &texts.doc(pos), &texts.doc(neg)});
        ++emitted;
      }
    }
  }
  local.pairs = pairs.size();
  if (stats != nullptr) *stats = local;
  return pairs;
}

std::map<uint32_t, DuetText> LoadTexts(const std::string &path,
                                       const KnowledgeGraph *kg,
                                       size_t max_mention_len) {
  std::map<uint32_t, DuetText> texts;
  ForEachLine(path, [&](size_t line, std::string_view row) {
    if (row.empty()) return;
    auto fields = Split(row, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(path, line, "expected 2 or 3 tab-separated fields");
    }
    uint64_t id;
    if (!ParseUint(fields[0], &id) || id > UINT32_MAX) {
      throw ParseError(path, line, "bad id");
    }
    DuetText text;
    if (!ParseIdList(fields[1], ' ', &text.words)) {
      throw ParseError(path, line, "bad word ids");
    }
    if (fields.size() == 3) {
      if (!fields[2].empty()) {
        for (std::string_view item : Split(fields[2], ',')) {
          std::vector<uint32_t> parts;
          if (!ParseIdList(item, ':', &parts) || parts.size() != 3) {
            throw ParseError(path, line, "bad entity annotation");
          }
          text.entities.push_back({parts[0], parts[1], parts[2]});
        }
      }
      try {
        ValidateDuetText(text);
      } catch (const ValidationError &e) {
        throw ParseError(path, line, e.what());
      }
      if (kg != nullptr) {
        for (const Mention &m : text.entities) {
          if (m.entity >= kg->num_entities()) {
            throw ParseError(path, line,
                             "unknown entity " + std::to_string(m.entity));
          }
        }
      }
    } else if (kg != nullptr) {
      text.entities = Annotate(text.words, *kg, max_mention_len);
    }
    if (!texts.emplace(static_cast<uint32_t>(id), std::move(text)).second) {
      throw ParseError(path, line, "duplicate id " + std::to_string(id));
    }
  });
  return texts;
}

std::string SerializeTexts(const std::map<uint32_t, DuetText> &texts,
                           bool with_entities) {
  std::string out;
  for (const auto &[id, text] : texts) {
    out += std::to_string(id);
    out += '\t';
    out += JoinIds(text.words, ' ');
    if (with_entities) {
      out += '\t';
      for (size_t i = 0; i < text.entities.size(); ++i) {
        const Mention &m = text.entities[i];
        if (i > 0) out += ',';
        out += std::to_string(m.entity) + ":" + std::to_string(m.start) + ":" +
               std::to_string(m.end);
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<ClickRecord> LoadClicks(const std::string &path) {
  std::vector<ClickRecord> records;
  ForEachLine(path, [&](size_t line, std::string_view row) {
    if (row.empty()) return;
    auto fields = Split(row, '\t');
    if (fields.size() != 4) {
      throw ParseError(path, line, "expected 4 tab-separated fields");
    }
    uint64_t q, d;
    ClickRecord r;
    if (!ParseUint(fields[0], &q) || q > UINT32_MAX ||
        !ParseUint(fields[1], &d) || d > UINT32_MAX ||
        !ParseUint(fields[2], &r.impressions) ||
        !ParseUint(fields[3], &r.clicks)) {
      throw ParseError(path, line, "bad click record");
    }
    if (r.impressions == 0) throw ParseError(path, line, "zero impressions");
    if (r.clicks > r.impressions) {
      throw ParseError(path, line, "more clicks than impressions");
    }
    r.query = static_cast<QueryId>(q);
    r.doc = static_cast<DocId>(d);
    records.push_back(r);
  });
  return records;
}

std::string SerializeClicks(const std::vector<ClickRecord> &records) {
  std::string out;
  for (const ClickRecord &r : records) {
    out += std::to_string(r.query) + "\t" + std::to_string(r.doc) + "\t" +
           std::to_string(r.impressions) + "\t" + std::to_string(r.clicks) +
           "\n";
  }
  return out;
}

std::vector<SplitEntry> LoadSplit(const std::string &path) {
  std::vector<SplitEntry> split;
  ForEachLine(path, [&](size_t line, std::string_view row) {
    if (row.empty()) return;
    auto fields = Split(row, '\t');
    if (fields.size() != 3) {
      throw ParseError(path, line, "expected 3 tab-separated fields");
    }
    uint64_t q;
    if (!ParseUint(fields[0], &q) || q > UINT32_MAX) {
      throw ParseError(path, line, "bad query id");
    }
    SplitEntry entry;
    entry.query = static_cast<QueryId>(q);
    if (fields[1] == "train") {
      entry.role = SplitRole::kTrain;
    } else if (fields[1] == "test") {
      entry.role = SplitRole::kTest;
    } else {
      throw ParseError(path, line, "role must be train or test");
    }
    entry.stratum = std::string(fields[2]);
    split.push_back(std::move(entry));
  });
  return split;
}

std::string SerializeSplit(const std::vector<SplitEntry> &split) {
  std::string out;
  for (const SplitEntry &e : split) {
    out += std::to_string(e.query);
    out += e.role == SplitRole::kTrain ? "\ttrain\t" : "\ttest\t";
    out += e.stratum;
    out += '\n';
  }
  return out;
}

}  // namespace edrm
