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

// Central-difference verification of analytic gradients.

#ifndef EDRM_GRAD_CHECK_H_
#define EDRM_GRAD_CHECK_H_

#include <functional>
#include <string>
#include <vector>

#include "edrm/param_store.h"

namespace edrm {

// Returns the loss and adds d(loss)/d(param) into the buffer. Must be
// deterministic in the parameter values.
using LossGradFn = std::function<double(const ParamStore &, GradBuffer *)>;

struct GradCheckOptions {
  double step = 1e-4;
  double tolerance = 1e-4;
  // Tensors larger than this are checked on a seeded random subset of this
  // many components.
  size_t max_per_tensor = 256;
  uint64_t seed = 0;
};

struct ParamCheck {
  std::string name;
  size_t checked = 0;
  double max_rel_error = 0.0;
  // Component with the largest error, for diagnostics.
  size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  bool pass = true;

  std::string Summary() const;
};

// Relative error |a - n| / max(|a|, |n|, 1e-8).
double RelativeError(double analytic, double numeric);

// Perturbs values in place and restores them before returning.
GradCheckReport GradCheck(const LossGradFn &fn, ParamStore &store,
                          const GradCheckOptions &options = {});

}  // namespace edrm

#endif  // EDRM_GRAD_CHECK_H_
