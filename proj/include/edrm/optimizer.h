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

#ifndef EDRM_OPTIMIZER_H_
#define EDRM_OPTIMIZER_H_

#include "edrm/param_store.h"

namespace edrm {

struct OptimizerConfig {
  double learning_rate = 0.001;
  double epsilon = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  // Epochs without validation improvement before training stops.
  int patience = 5;

  void Validate() const;
};

// One bias-corrected Adam update of every active parameter from
// Param::grad, then zeroes all gradients. Throws before touching any value
// if an active gradient is non-finite.
void AdamStep(ParamStore &store, const OptimizerConfig &config);

}  // namespace edrm

#endif  // EDRM_OPTIMIZER_H_
