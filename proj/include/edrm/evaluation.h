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

// Run files, relevance judgments, ranking metrics and the paired
// randomization test.

#ifndef EDRM_EVALUATION_H_
#define EDRM_EVALUATION_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edrm/corpus.h"

namespace edrm {

// query -> doc -> grade.
using QrelsRow = std::map<DocId, double>;
using Qrels = std::map<QueryId, QrelsRow>;

Qrels QrelsFromLabels(const std::vector<LabeledPair> &labels);
// "query_id \t doc_id \t grade" lines.
Qrels LoadQrels(const std::string &path);
std::string SerializeQrels(const Qrels &qrels);

struct RunEntry {
  QueryId query = 0;
  DocId doc = 0;
  double score = 0.0;
  size_t rank = 0;

  bool operator==(const RunEntry &) const = default;
};

// Per query, entries in rank order (1-based ranks).
using Run = std::map<QueryId, std::vector<RunEntry>>;

// Orders each query's entries by score descending, ties by ascending doc
// id, and assigns ranks. Duplicate (query, doc) entries are an error.
Run MakeRun(std::vector<RunEntry> entries);
// "query_id \t doc_id \t score \t rank" lines.
std::string SerializeRun(const Run &run);
Run LoadRun(const std::string &path);

std::vector<DocId> Ranking(const std::vector<RunEntry> &entries);

// sum_{r <= k} (2^g - 1) / log2(r + 1), normalized by the ideal ordering of
// every judged document. nullopt when no judged grade is positive. Unjudged
// documents have grade 0.
std::optional<double> NdcgAtK(std::span<const DocId> ranking,
                              const QrelsRow &grades, size_t k);

// 1 / rank of the first document with grade > 0. nullopt when the judgments
// have no such document; 0 when the ranking misses all of them.
std::optional<double> ReciprocalRank(std::span<const DocId> ranking,
                                     const QrelsRow &grades);

struct MetricReport {
  std::string metric;
  std::vector<QueryId> queries;
  std::vector<double> values;
  // Queries in the run with no positive judgment.
  size_t excluded = 0;
  double mean = 0.0;
  std::optional<double> p_value;

  std::optional<double> Value(QueryId query) const;
};

// metric is "mrr" or "ndcg@<k>". Only queries present in both run and
// qrels are evaluated.
MetricReport Evaluate(const Run &run, const Qrels &qrels,
                      const std::string &metric);

// Two-sided paired randomization test on per-query differences. Each trial
// flips every difference's sign with probability 1/2; returns
// (count(|mean| >= |observed|) + 1) / (trials + 1).
double PermutationTest(std::span<const double> a, std::span<const double> b,
                       size_t trials, uint64_t seed);

// Fills report.p_value against the baseline over the shared queries.
void AttachPValue(MetricReport &report, const MetricReport &baseline,
                  size_t trials, uint64_t seed);

// "metric,query_id,value" rows followed by "metric,mean,<mean>" and, when
// present, "metric,p_value,<p>".
std::string MetricsCsv(const std::vector<MetricReport> &reports);
std::vector<MetricReport> ParseMetricsCsv(const std::string &text);
std::string MetricsTable(const std::vector<MetricReport> &reports);

}  // namespace edrm

#endif  // EDRM_EVALUATION_H_
