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

#include "edrm/optimizer.h"

#include <cmath>

namespace edrm {

void OptimizerConfig::Validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (!(beta1 > 0.0 && beta1 < 1.0)) {
    throw ValidationError("beta1 must be in (0, 1)");
  }
  if (!(beta2 > 0.0 && beta2 < 1.0)) {
    throw ValidationError("beta2 must be in (0, 1)");
  }
  if (patience < 1) throw ValidationError("patience must be >= 1");
}

void AdamStep(ParamStore &store, const OptimizerConfig &config) {
  for (const Param &p : store.params()) {
    if (p.active && !p.grad.AllFinite()) {
      throw Error("non-finite gradient in parameter " + p.name);
    }
  }
  for (Param &p : store.params()) {
    if (p.active) {
      ++p.step;
      double t = static_cast<double>(p.step);
      double correction1 = 1.0 - std::pow(config.beta1, t);
      double correction2 = 1.0 - std::pow(config.beta2, t);
      auto value = p.value.values();
      auto grad = p.grad.values();
      auto m = p.first_moment.values();
      auto v = p.second_moment.values();
      for (size_t i = 0; i < value.size(); ++i) {
        double g = grad[i];
        m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g;
        v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g * g;
        double m_hat = m[i] / correction1;
        double v_hat = v[i] / correction2;
        value[i] -= config.learning_rate * m_hat /
                    (std::sqrt(v_hat) + config.epsilon);
      }
    }
    p.grad.Fill(0.0);
  }
}

}  // namespace edrm
