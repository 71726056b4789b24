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

#include "srforge/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace srforge {
inline namespace SRFORGE_PRECISION {

double noam_lr(std::uint64_t step, const ScheduleConfig& cfg) {
  if (step == 0) throw std::invalid_argument("learning-rate schedule starts at step 1");
  if (cfg.warmup_steps == 0) throw std::invalid_argument("warmup_steps must be at least 1");
  if (cfg.d_model == 0) throw std::invalid_argument("d_model must be positive");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(cfg.warmup_steps);
  return cfg.scale / std::sqrt(static_cast<double>(cfg.d_model)) *
         std::min(1.0 / std::sqrt(s), s / (w * std::sqrt(w)));
}

void adam_step(ParameterStore& store, double lr, const AdamConfig& cfg) {
  for (const auto& p : store.parameters()) {
    if (!p.has_grad) throw std::logic_error("parameter without gradient: " + p.name);
  }
  const std::uint64_t t = store.step + 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (auto& p : store.parameters()) {
    auto w = p.value.data();
    auto g = p.grad.data();
    auto m = p.m.data();
    auto v = p.v.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
      const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
      m[i] = static_cast<real>(mi);
      v[i] = static_cast<real>(vi);
      w[i] -= static_cast<real>(lr * (mi / c1) / (std::sqrt(vi / c2) + cfg.eps));
    }
  }
  store.step = t;
  store.zero_grad();
}

bool gradients_finite(const ParameterStore& store) {
  for (const auto& p : store.parameters()) {
    for (real x : p.grad.data()) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
