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

#include "edrm/grad_check.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "edrm/rng.h"

namespace edrm {

double RelativeError(double analytic, double numeric) {
  double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

std::string GradCheckReport::Summary() const {
  std::ostringstream out;
  for (const ParamCheck &p : params) {
    out << (p.pass ? "ok   " : "FAIL ") << p.name << " checked=" << p.checked
        << " max_rel_error=" << p.max_rel_error;
    if (!p.pass) {
      out << " at [" << p.worst_index << "] analytic=" << p.worst_analytic
          << " numeric=" << p.worst_numeric;
    }
    out << "\n";
  }
  out << (pass ? "PASS" : "FAIL") << " max_rel_error=" << max_rel_error << "\n";
  return out.str();
}

GradCheckReport GradCheck(const LossGradFn &fn, ParamStore &store,
                          const GradCheckOptions &options) {
  GradBuffer analytic(store);
  fn(store, &analytic);

  GradCheckReport report;
  for (size_t p = 0; p < store.size(); ++p) {
    Param &param = store[p];
    ParamCheck check;
    check.name = param.name;

    std::vector<size_t> indices(param.value.size());
    std::iota(indices.begin(), indices.end(), 0);
    if (indices.size() > options.max_per_tensor) {
      Rng rng = NamedStream(options.seed, "gradcheck/" + param.name);
      Shuffle(indices, rng);
      indices.resize(options.max_per_tensor);
      std::sort(indices.begin(), indices.end());
    }

    for (size_t i : indices) {
      double original = param.value[i];
      param.value[i] = original + options.step;
      double plus = fn(store, nullptr);
      param.value[i] = original - options.step;
      double minus = fn(store, nullptr);
      param.value[i] = original;

      double numeric = (plus - minus) / (2.0 * options.step);
      double a = analytic[p][i];
      double err = RelativeError(a, numeric);
      ++check.checked;
      if (check.checked == 1 || err > check.max_rel_error) {
        check.max_rel_error = err;
        check.worst_index = i;
        check.worst_analytic = a;
        check.worst_numeric = numeric;
      }
    }
    check.pass = check.max_rel_error < options.tolerance;
    report.max_rel_error = std::max(report.max_rel_error, check.max_rel_error);
    report.pass = report.pass && check.pass;
    report.params.push_back(std::move(check));
  }
  return report;
}

}  // namespace edrm
