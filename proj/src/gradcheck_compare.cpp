// Copyright 2026 The srforge Authors. All Rights Reserved.
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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srforge/gradcheck.hpp"

namespace srforge {

GradCheckResult compare_gradients(const GradientSet& analytic, const GradientSet& numeric, double floor) {
  if (analytic.size() != numeric.size()) throw std::invalid_argument("gradient sets differ in size");
  double total2 = 0.0;
  for (const NamedGradient& n : numeric) {
    for (double v : n.values) total2 += v * v;
  }
  const double abs_floor = floor * std::sqrt(total2);
  GradCheckResult result;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    const NamedGradient& a = analytic[k];
    const NamedGradient& n = numeric[k];
    if (a.name != n.name || a.values.size() != n.values.size()) {
      throw std::invalid_argument("gradient sets disagree at " + a.name);
    }
    double d2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      d2 += (a.values[i] - n.values[i]) * (a.values[i] - n.values[i]);
      a2 += a.values[i] * a.values[i];
      n2 += n.values[i] * n.values[i];
    }
    ParameterError e{a.name, 0.0, std::sqrt(a2), std::sqrt(n2)};
    e.rel_error = std::sqrt(d2) / std::max({e.analytic_norm, e.numeric_norm, abs_floor});
    if (result.worst_parameter.empty() || e.rel_error > result.max_rel_error) {
      result.max_rel_error = e.rel_error;
      result.worst_parameter = a.name;
    }
    result.coordinates += a.values.size();
    result.parameters.push_back(std::move(e));
  }
  return result;
}

}  // namespace srforge
