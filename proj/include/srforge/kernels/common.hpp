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

// Dense kernels behind the autodiff ops. Two implementations share every
// signature:
//
//   reference::  plain serial loops, the readable definition used by tests
//   parallel::   cache-blocked, OpenMP over independent outputs
//
// parallel:: never splits a reduction across threads, so its results are
// bitwise identical for any thread count. They differ from reference:: only
// by floating-point summation order.
//
// All matrices are row-major and contiguous.

#include <cstddef>
#include <span>

namespace srforge::kernels {

template <class T>
struct ConstMatrix {
  std::span<const T> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

template <class T>
struct Matrix {
  std::span<T> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

enum class Op { kNone, kTranspose };

/// Scaled dot-product attention over `batch` independent sequences.
/// q is [batch, q_len, dim], k and v are [batch, kv_len, dim]; head h owns
/// feature slice [h*dim/heads, (h+1)*dim/heads). probs is
/// [batch, heads, q_len, kv_len]. With `causal`, query i sees keys 0..i only
/// and the masked weights are exactly zero.
struct AttentionShape {
  std::size_t batch = 1;
  std::size_t q_len = 1;
  std::size_t kv_len = 1;
  std::size_t dim = 1;
  std::size_t heads = 1;
  bool causal = false;

  std::size_t head_dim() const { return dim / heads; }
};

}  // namespace srforge::kernels
