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
#include <string>
#include <vector>

#include "srforge/model_config.hpp"

namespace srforge {

struct NamedGradient {
  std::string name;
  std::vector<double> values;
};

using GradientSet = std::vector<NamedGradient>;

struct ParameterError {
  std::string name;
  double rel_error = 0.0;
  double analytic_norm = 0.0;
  double numeric_norm = 0.0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_parameter;
  std::size_t coordinates = 0;
  std::vector<ParameterError> parameters;
};

/// Gradients of a tiny full model (d_model 8, one encoder and one decoder
/// layer, two datasets, label smoothing 0.1, dropout off). Parameters are
/// initialized from `seed` and rounded to float in both builds, so the 32-bit
/// and 64-bit variants evaluate the same point.
GradientSet analytic_gradients_f32(EncoderKind kind, std::uint64_t seed);
GradientSet analytic_gradients_f64(EncoderKind kind, std::uint64_t seed);
/// Five-point central differences with step h, one coordinate at a time.
GradientSet numeric_gradients_f32(EncoderKind kind, std::uint64_t seed, double h);
GradientSet numeric_gradients_f64(EncoderKind kind, std::uint64_t seed, double h);

/// Per parameter: ||a - n|| / max(||a||, ||n||, floor * ||N||), where N is
/// the full numeric gradient. The floor keeps the measure defined for
/// gradients that vanish identically (attention key biases) or nearly so.
GradCheckResult compare_gradients(const GradientSet& analytic, const GradientSet& numeric, double floor);

inline constexpr double kGradCheckFloor = 1e-4;

}  // namespace srforge
