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

// Mini-batch pairwise training with early stopping on validation MRR.

#ifndef EDRM_TRAINER_H_
#define EDRM_TRAINER_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "edrm/evaluation.h"
#include "edrm/model.h"

namespace edrm {

struct EpochStats {
  size_t epoch = 0;
  // Mean hinge per training pair.
  double train_loss = 0.0;
  // NaN without a validation set.
  double val_mrr = 0.0;
  double seconds = 0.0;
};

struct TrainOptions {
  size_t threads = 1;
  // Wall-clock seconds go into the log only when set, so that logs of
  // identical runs stay byte-identical.
  bool record_time = false;
  // Called after every epoch with the current parameters. Returning false
  // stops training after that epoch.
  std::function<bool(const EpochStats &, const EdrmModel &)> on_epoch;
};

struct TrainResult {
  std::vector<EpochStats> epochs;
  size_t best_epoch = 0;
  double best_val_mrr = 0.0;
  bool early_stopped = false;
  size_t train_pairs = 0;
  std::vector<QueryId> train_queries;
  std::vector<QueryId> valid_queries;
  // CSV "epoch,train_loss,val_mrr,seconds".
  std::string log;
};

// Holds out config.valid_fraction of the given queries (at least one when
// the fraction is positive and two or more queries are given) with the
// "train/valid-split" stream. Returns {train, valid}, each sorted.
std::pair<std::vector<QueryId>, std::vector<QueryId>> SplitValidation(
    std::vector<QueryId> queries, double fraction, uint64_t seed);

// Trains model in place on labels restricted to the given queries. The best
// validation parameters are restored at the end.
TrainResult Train(EdrmModel &model, const CorpusStore &corpus,
                  const std::vector<LabeledPair> &labels,
                  const std::vector<QueryId> &queries,
                  const TrainOptions &options = {});

// Loss and gradient of a batch, computed in fixed chunks whose gradients
// are merged by a fixed pairwise tree, so the result does not depend on the
// thread count. Gradients are added into store's Param::grad.
double BatchLossAndGrad(const EdrmModel &model, ParamStore &store,
                        std::span<const PairwiseInstance> batch,
                        size_t threads);

// Scores every labeled document of the given queries.
Run ScoreRun(const EdrmModel &model, const CorpusStore &corpus,
             const std::vector<LabeledPair> &labels,
             const std::vector<QueryId> &queries, size_t threads = 1);

// Share of pairs with f(q, d+) > f(q, d-).
double PairwiseAccuracy(const EdrmModel &model,
                        std::span<const PairwiseInstance> pairs);

std::vector<LabeledPair> LabelsFor(const std::vector<LabeledPair> &labels,
                                   const std::vector<QueryId> &queries);

// EDRM_THREADS when set and valid, else 1.
size_t DefaultThreads();

}  // namespace edrm

#endif  // EDRM_TRAINER_H_
