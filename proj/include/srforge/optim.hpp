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

#pragma once

#include <cstdint>

#include "srforge/graph.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {

struct ScheduleConfig {
  std::size_t d_model = 256;
  std::uint64_t warmup_steps = 4000;
  double scale = 1.0;
};

/// gamma * d^-1/2 * min(step^-1/2, step * warmup^-3/2). Throws for step 0.
double noam_lr(std::uint64_t step, const ScheduleConfig& cfg);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-9;
};

/// One bias-corrected Adam update of every parameter, then zero_grad().
/// Throws std::logic_error if any parameter received no gradient.
void adam_step(ParameterStore& store, double lr, const AdamConfig& cfg = {});

/// True when every gradient entry is finite.
bool gradients_finite(const ParameterStore& store);

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
