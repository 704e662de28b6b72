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

#include "edrm/trainer.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <set>
#include <thread>

#include "edrm/io.h"
#include "edrm/rng.h"

namespace edrm {

namespace {

// Instances per gradient chunk. Fixed so the reduction tree depends only on
// the batch size.
constexpr size_t kChunk = 8;

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void ParallelFor(size_t n, size_t threads,
                 const std::function<void(size_t)> &fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&]() {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread &t : pool) t.join();
  for (const std::exception_ptr &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string FormatMetric(double v) {
  return std::isnan(v) ? "NA" : FormatDouble(v);
}

}  // namespace

size_t DefaultThreads() {
  const char *env = std::getenv("EDRM_THREADS");
  uint64_t n = 0;
  if (env != nullptr && ParseUint(env, &n) && n >= 1) return n;
  return 1;
}

std::pair<std::vector<QueryId>, std::vector<QueryId>> SplitValidation(
    std::vector<QueryId> queries, double fraction, uint64_t seed) {
  std::sort(queries.begin(), queries.end());
  queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
  if (!(fraction > 0.0) || queries.size() < 2) return {queries, {}};
  size_t held = static_cast<size_t>(
      std::floor(static_cast<double>(queries.size()) * fraction));
  held = std::clamp<size_t>(held, 1, queries.size() - 1);
  std::vector<QueryId> shuffled = queries;
  Rng rng = NamedStream(seed, "train/valid-split");
  Shuffle(shuffled, rng);
  std::vector<QueryId> valid(shuffled.begin(), shuffled.begin() + held);
  std::vector<QueryId> train(shuffled.begin() + held, shuffled.end());
  std::sort(valid.begin(), valid.end());
  std::sort(train.begin(), train.end());
  return {train, valid};
}

std::vector<LabeledPair> LabelsFor(const std::vector<LabeledPair> &labels,
                                   const std::vector<QueryId> &queries) {
  std::set<QueryId> keep(queries.begin(), queries.end());
  std::vector<LabeledPair> out;
  for (const LabeledPair &l : labels) {
    if (keep.count(l.query)) out.push_back(l);
  }
  return out;
}

double BatchLossAndGrad(const EdrmModel &model, ParamStore &store,
                        std::span<const PairwiseInstance> batch,
                        size_t threads) {
  size_t chunks = (batch.size() + kChunk - 1) / kChunk;
  if (chunks == 0) return 0.0;
  std::vector<GradBuffer> grads(chunks);
  std::vector<double> losses(chunks, 0.0);
  ParallelFor(chunks, threads, [&](size_t c) {
    grads[c] = GradBuffer(store);
    size_t begin = c * kChunk;
    size_t end = std::min(batch.size(), begin + kChunk);
    losses[c] = model.PairwiseLoss(store, batch.subspan(begin, end - begin),
                                   &grads[c]);
  });
  for (size_t stride = 1; stride < chunks; stride *= 2) {
    for (size_t i = 0; i + stride < chunks; i += 2 * stride) {
      grads[i].Add(grads[i + stride]);
      losses[i] += losses[i + stride];
    }
  }
  grads[0].AccumulateInto(store);
  return losses[0];
}

Run ScoreRun(const EdrmModel &model, const CorpusStore &corpus,
             const std::vector<LabeledPair> &labels,
             const std::vector<QueryId> &queries, size_t threads) {
  std::vector<LabeledPair> wanted = LabelsFor(labels, queries);
  std::vector<RunEntry> entries(wanted.size());
  ParallelFor(wanted.size(), threads, [&](size_t i) {
    const LabeledPair &l = wanted[i];
    entries[i] = {l.query, l.doc,
                  model.Score(corpus.query(l.query), corpus.doc(l.doc)), 0};
  });
  return MakeRun(std::move(entries));
}

double PairwiseAccuracy(const EdrmModel &model,
                        std::span<const PairwiseInstance> pairs) {
  if (pairs.empty()) return 0.0;
  size_t correct = 0;
  for (const PairwiseInstance &p : pairs) {
    if (model.Score(*p.query_text, *p.positive_text) >
        model.Score(*p.query_text, *p.negative_text)) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

TrainResult Train(EdrmModel &model, const CorpusStore &corpus,
                  const std::vector<LabeledPair> &labels,
                  const std::vector<QueryId> &queries,
                  const TrainOptions &options) {
  const ModelConfig &config = model.config();
  TrainResult result;
  std::tie(result.train_queries, result.valid_queries) =
      SplitValidation(queries, config.valid_fraction, config.seed);

  std::vector<LabeledPair> valid_labels =
      LabelsFor(labels, result.valid_queries);
  Qrels valid_qrels = QrelsFromLabels(valid_labels);
  std::vector<PairwiseInstance> pairs =
      MakePairs(LabelsFor(labels, result.train_queries), corpus,
                config.max_pairs_per_query);
  if (pairs.empty()) throw ValidationError("no training pairs");
  result.train_pairs = pairs.size();

  ParamStore &store = model.params();
  store.ZeroGrad();
  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<Tensor> best;
  size_t since_best = 0;
  result.log = "epoch,train_loss,val_mrr,seconds\n";
  for (size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    Rng rng = NamedStream(config.seed, "train/shuffle/" + std::to_string(epoch));
    Shuffle(order, rng);

    double total = 0.0;
    std::vector<PairwiseInstance> batch;
    for (size_t b = 0, begin = 0; begin < order.size();
         ++b, begin += config.batch_size) {
      size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (size_t i = begin; i < end; ++i) batch.push_back(pairs[order[i]]);
      double loss = BatchLossAndGrad(model, store, batch, options.threads);
      if (!std::isfinite(loss)) {
        throw Error("non-finite loss in epoch " + std::to_string(epoch) +
                    " batch " + std::to_string(b) + " (first pair: query " +
                    std::to_string(batch.front().query) + ", docs " +
                    std::to_string(batch.front().positive) + "/" +
                    std::to_string(batch.front().negative) + ")");
      }
      AdamStep(store, config.optimizer);
      total += loss;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = total / static_cast<double>(pairs.size());
    stats.val_mrr = std::numeric_limits<double>::quiet_NaN();
    if (!valid_qrels.empty()) {
      MetricReport mrr =
          Evaluate(ScoreRun(model, corpus, valid_labels, result.valid_queries,
                            options.threads),
                   valid_qrels, "mrr");
      if (!mrr.values.empty()) stats.val_mrr = mrr.mean;
    }
    stats.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    result.epochs.push_back(stats);
    result.log += std::to_string(epoch) + "," + FormatDouble(stats.train_loss) +
                  "," + FormatMetric(stats.val_mrr) + "," +
                  (options.record_time ? FormatDouble(stats.seconds) : "NA") +
                  "\n";

    bool validated = !std::isnan(stats.val_mrr);
    if (!validated || best.empty() || stats.val_mrr > result.best_val_mrr) {
      result.best_epoch = epoch;
      result.best_val_mrr = stats.val_mrr;
      best.clear();
      for (const Param &p : store.params()) best.push_back(p.value);
      since_best = 0;
    } else {
      ++since_best;
    }

    if (options.on_epoch && !options.on_epoch(stats, model)) break;
    if (validated && since_best >= static_cast<size_t>(config.optimizer.patience)) {
      result.early_stopped = true;
      break;
    }
  }
  for (size_t i = 0; i < best.size(); ++i) store[i].value = best[i];
  return result;
}

}  // namespace edrm
