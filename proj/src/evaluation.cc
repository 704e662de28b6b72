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

#include "edrm/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "edrm/io.h"
#include "edrm/rng.h"

namespace edrm {

Qrels QrelsFromLabels(const std::vector<LabeledPair> &labels) {
  Qrels qrels;
  for (const LabeledPair &l : labels) qrels[l.query][l.doc] = l.grade;
  return qrels;
}

Qrels LoadQrels(const std::string &path) {
  Qrels qrels;
  ForEachLine(path, [&](size_t line, std::string_view row) {
    if (row.empty()) return;
    auto fields = Split(row, '\t');
    uint64_t q, d;
    double grade;
    if (fields.size() != 3 || !ParseUint(fields[0], &q) || q > UINT32_MAX ||
        !ParseUint(fields[1], &d) || d > UINT32_MAX ||
        !ParseDouble(fields[2], &grade)) {
      throw ParseError(path, line, "expected query_id, doc_id, grade");
    }
    if (!std::isfinite(grade) || grade < 0.0) {
      throw ParseError(path, line, "grade must be finite and non-negative");
    }
    if (!qrels[q].emplace(static_cast<DocId>(d), grade).second) {
      throw ParseError(path, line, "duplicate judgment");
    }
  });
  return qrels;
}

std::string SerializeQrels(const Qrels &qrels) {
  std::string out;
  for (const auto &[q, row] : qrels) {
    for (const auto &[d, g] : row) {
      out += std::to_string(q) + "\t" + std::to_string(d) + "\t" +
             FormatDouble(g) + "\n";
    }
  }
  return out;
}

Run MakeRun(std::vector<RunEntry> entries) {
  Run run;
  for (RunEntry &e : entries) run[e.query].push_back(e);
  for (auto &[q, list] : run) {
    std::sort(list.begin(), list.end(),
              [](const RunEntry &a, const RunEntry &b) {
                if (a.score != b.score) return a.score > b.score;
                return a.doc < b.doc;
              });
    for (size_t i = 0; i < list.size(); ++i) list[i].rank = i + 1;
    std::vector<DocId> docs = Ranking(list);
    std::sort(docs.begin(), docs.end());
    auto dup = std::adjacent_find(docs.begin(), docs.end());
    if (dup != docs.end()) {
      throw ValidationError("run lists doc " + std::to_string(*dup) +
                            " twice for query " + std::to_string(q));
    }
  }
  return run;
}

std::string SerializeRun(const Run &run) {
  std::string out;
  for (const auto &[q, list] : run) {
    for (const RunEntry &e : list) {
      out += std::to_string(e.query) + "\t" + std::to_string(e.doc) + "\t" +
             FormatDouble(e.score) + "\t" + std::to_string(e.rank) + "\n";
    }
  }
  return out;
}

Run LoadRun(const std::string &path) {
  std::vector<RunEntry> entries;
  ForEachLine(path, [&](size_t line, std::string_view row) {
    if (row.empty()) return;
    auto fields = Split(row, '\t');
    uint64_t q, d, rank;
    double score;
    if (fields.size() != 4 || !ParseUint(fields[0], &q) || q > UINT32_MAX ||
        !ParseUint(fields[1], &d) || d > UINT32_MAX ||
        !ParseDouble(fields[2], &score) || !ParseUint(fields[3], &rank)) {
      throw ParseError(path, line, "expected query_id, doc_id, score, rank");
    }
    if (!std::isfinite(score)) throw ParseError(path, line, "non-finite score");
    entries.push_back({static_cast<QueryId>(q), static_cast<DocId>(d), score,
                       static_cast<size_t>(rank)});
  });
  // Ranks are recomputed from scores; the file's rank column is advisory.
  return MakeRun(std::move(entries));
}

std::vector<DocId> Ranking(const std::vector<RunEntry> &entries) {
  std::vector<DocId> docs;
  docs.reserve(entries.size());
  for (const RunEntry &e : entries) docs.push_back(e.doc);
  return docs;
}

namespace {

double Gain(double grade) { return std::exp2(grade) - 1.0; }

double Discount(size_t rank) {
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

double GradeOf(const QrelsRow &grades, DocId doc) {
  auto it = grades.find(doc);
  return it == grades.end() ? 0.0 : it->second;
}

}  // namespace

std::optional<double> NdcgAtK(std::span<const DocId> ranking,
                              const QrelsRow &grades, size_t k) {
  if (k < 1) throw ValidationError("NDCG cutoff must be >= 1");
  std::vector<double> ideal;
  for (const auto &[doc, g] : grades) ideal.push_back(g);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (size_t r = 0; r < std::min(k, ideal.size()); ++r) {
    idcg += Gain(ideal[r]) * Discount(r + 1);
  }
  if (!(idcg > 0.0)) return std::nullopt;
  double dcg = 0.0;
  for (size_t r = 0; r < std::min(k, ranking.size()); ++r) {
    dcg += Gain(GradeOf(grades, ranking[r])) * Discount(r + 1);
  }
  return dcg / idcg;
}

std::optional<double> ReciprocalRank(std::span<const DocId> ranking,
                                     const QrelsRow &grades) {
  bool any = false;
  for (const auto &[doc, g] : grades) any = any || g > 0.0;
  if (!any) return std::nullopt;
  for (size_t r = 0; r < ranking.size(); ++r) {
    if (GradeOf(grades, ranking[r]) > 0.0) {
      return 1.0 / static_cast<double>(r + 1);
    }
  }
  return 0.0;
}

std::optional<double> MetricReport::Value(QueryId query) const {
  auto it = std::lower_bound(queries.begin(), queries.end(), query);
  if (it == queries.end() || *it != query) return std::nullopt;
  return values[it - queries.begin()];
}

MetricReport Evaluate(const Run &run, const Qrels &qrels,
                      const std::string &metric) {
  size_t k = 0;
  bool mrr = metric == "mrr";
  if (!mrr) {
    uint64_t cutoff = 0;
    if (metric.rfind("ndcg@", 0) != 0 ||
        !ParseUint(std::string_view(metric).substr(5), &cutoff) || cutoff < 1) {
      throw ValidationError("unknown metric '" + metric + "'");
    }
    k = cutoff;
  }
  MetricReport report;
  report.metric = metric;
  double sum = 0.0;
  for (const auto &[q, entries] : run) {
    auto judged = qrels.find(q);
    if (judged == qrels.end()) {
      ++report.excluded;
      continue;
    }
    std::vector<DocId> ranking = Ranking(entries);
    std::optional<double> v = mrr ? ReciprocalRank(ranking, judged->second)
                                  : NdcgAtK(ranking, judged->second, k);
    if (!v) {
      ++report.excluded;
      continue;
    }
    report.queries.push_back(q);
    report.values.push_back(*v);
    sum += *v;
  }
  if (!report.values.empty()) {
    report.mean = sum / static_cast<double>(report.values.size());
  }
  return report;
}

double PermutationTest(std::span<const double> a, std::span<const double> b,
                       size_t trials, uint64_t seed) {
  if (a.size() != b.size()) {
    throw ValidationError("permutation test needs paired values, got " +
                          std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
  }
  if (trials < 1) throw ValidationError("permutation test needs >= 1 trial");
  std::vector<double> diff(a.size());
  double observed = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    diff[i] = b[i] - a[i];
    observed += diff[i];
  }
  observed = std::abs(observed);
  // Sums of the same terms in a different sign pattern can land an ulp
  // below the observed sum; count those as reaching it.
  const double slack = 1e-12 * std::max(1.0, observed);
  Rng rng = NamedStream(seed, "permutation");
  size_t hits = 0;
  for (size_t t = 0; t < trials; ++t) {
    double sum = 0.0;
    uint64_t bits = 0;
    for (size_t i = 0; i < diff.size(); ++i) {
      if (i % 64 == 0) bits = rng();
      sum += (bits & 1) ? -diff[i] : diff[i];
      bits >>= 1;
    }
    if (std::abs(sum) >= observed - slack) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(trials + 1);
}

void AttachPValue(MetricReport &report, const MetricReport &baseline,
                  size_t trials, uint64_t seed) {
  std::vector<double> a, b;
  for (size_t i = 0; i < report.queries.size(); ++i) {
    std::optional<double> base = baseline.Value(report.queries[i]);
    if (!base) continue;
    a.push_back(*base);
    b.push_back(report.values[i]);
  }
  if (a.empty()) {
    throw ValidationError("run and baseline share no evaluated query");
  }
  report.p_value = PermutationTest(a, b, trials, seed);
}

std::string MetricsCsv(const std::vector<MetricReport> &reports) {
  std::string out = "metric,query_id,value\n";
  for (const MetricReport &r : reports) {
    for (size_t i = 0; i < r.queries.size(); ++i) {
      out += r.metric + "," + std::to_string(r.queries[i]) + "," +
             FormatDouble(r.values[i]) + "\n";
    }
    out += r.metric + ",excluded," + std::to_string(r.excluded) + "\n";
    out += r.metric + ",mean," + FormatDouble(r.mean) + "\n";
    if (r.p_value) out += r.metric + ",p_value," + FormatDouble(*r.p_value) + "\n";
  }
  return out;
}

std::vector<MetricReport> ParseMetricsCsv(const std::string &text) {
  std::vector<MetricReport> reports;
  size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (line.empty() || line_no == 1) continue;
    auto fields = Split(line, ',');
    double value;
    if (fields.size() != 3 || !ParseDouble(fields[2], &value)) {
      throw ValidationError("metrics line " + std::to_string(line_no) +
                            ": expected metric,query_id,value");
    }
    if (reports.empty() || reports.back().metric != fields[0]) {
      reports.emplace_back();
      reports.back().metric = std::string(fields[0]);
    }
    MetricReport &r = reports.back();
    uint64_t q;
    if (fields[1] == "mean") {
      r.mean = value;
    } else if (fields[1] == "p_value") {
      r.p_value = value;
    } else if (fields[1] == "excluded") {
      r.excluded = static_cast<size_t>(value);
    } else if (ParseUint(fields[1], &q)) {
      r.queries.push_back(static_cast<QueryId>(q));
      r.values.push_back(value);
    } else {
      throw ValidationError("metrics line " + std::to_string(line_no) +
                            ": bad query id");
    }
  }
  return reports;
}

std::string MetricsTable(const std::vector<MetricReport> &reports) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %8s %9s %10s %10s\n", "metric",
                "queries", "excluded", "mean", "p_value");
  out += buf;
  for (const MetricReport &r : reports) {
    std::string p = r.p_value ? FormatDouble(*r.p_value) : "-";
    std::snprintf(buf, sizeof(buf), "%-10s %8zu %9zu %10.4f %10s\n",
                  r.metric.c_str(), r.queries.size(), r.excluded, r.mean,
                  p.c_str());
    out += buf;
  }
  return out;
}

}  // namespace edrm
