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
#include <span>
#include <vector>

#include "srforge/graph.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {

inline constexpr real kLayerNormEps = real(1e-5);

/// y = x W + b over the last axis. x is [..., in], W is [in, out], b is [out]
/// (pass an invalid Var for no bias).
Var linear(Graph& g, Var x, Var w, Var b);

Var relu(Graph& g, Var x);

/// Elementwise sum of equal shapes.
Var add(Graph& g, Var a, Var b);

/// Inserts a new axis of length `count` at `axis`, repeating x along it.
Var expand(Graph& g, Var x, int axis, std::size_t count);

/// Concatenates along the last axis; leading shapes must agree.
Var concat_last(Graph& g, Var a, Var b);

/// Maximum over `axis`, which is removed. Ties route the gradient to the
/// first maximal entry.
Var max_over(Graph& g, Var x, int axis);

Var reshape(Graph& g, Var x, Shape shape);

/// Normalizes over the last axis (epsilon 1e-5), then applies gain and bias.
Var layer_norm(Graph& g, Var x, Var gain, Var bias);

/// Inverted dropout. Identity when the graph is not in training mode or p == 0.
Var dropout(Graph& g, Var x, real p);

/// Multi-head scaled dot-product attention core. q is [S, Lq, d], k and v
/// are [S, Lk, d]. Projections are separate linear ops.
Var attention(Graph& g, Var q, Var k, Var v, std::size_t heads, bool causal);

/// Looks up rows of table [vocab, d] for ids [batch, len] -> [batch, len, d].
Var embedding(Graph& g, Var table, std::span<const int> ids, std::size_t batch, std::size_t len);

/// Mean label-smoothed cross-entropy over rows of logits [N, v] where
/// keep[n] != 0. Target distribution: (1 - eps) one-hot + eps / v uniform.
/// Throws std::invalid_argument when no row is kept.
Var cross_entropy(Graph& g, Var logits, std::span<const int> targets,
                  std::span<const std::uint8_t> keep, real eps);

/// sum(x * weights); the scalar probe used by gradient checks.
Var weighted_sum(Graph& g, Var x, const Tensor& weights);

/// Sinusoidal encodings [len, d]: even dims sin(pos / 10000^(2i/d)), odd dims cos.
Tensor sinusoidal_positional_encoding(std::size_t len, std::size_t d);

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
