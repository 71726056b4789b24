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

#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/kernels/common.hpp"

namespace srforge::kernels {

struct GemmDims {
  std::size_t m, n, k;
};

template <class T>
GemmDims check_gemm(Op op_a, Op op_b, const ConstMatrix<T>& a, const ConstMatrix<T>& b,
                    const Matrix<T>& c) {
  const std::size_t m = op_a == Op::kNone ? a.rows : a.cols;
  const std::size_t ka = op_a == Op::kNone ? a.cols : a.rows;
  const std::size_t kb = op_b == Op::kNone ? b.rows : b.cols;
  const std::size_t n = op_b == Op::kNone ? b.cols : b.rows;
  if (ka != kb || c.rows != m || c.cols != n) {
    throw std::invalid_argument("gemm: shape mismatch (" + std::to_string(m) + "x" +
                                std::to_string(ka) + " * " + std::to_string(kb) + "x" +
                                std::to_string(n) + " -> " + std::to_string(c.rows) + "x" +
                                std::to_string(c.cols) + ")");
  }
  if (a.data.size() < a.rows * a.cols || b.data.size() < b.rows * b.cols ||
      c.data.size() < c.rows * c.cols) {
    throw std::invalid_argument("gemm: buffer smaller than its shape");
  }
  return {m, n, ka};
}

inline void check_attention(const AttentionShape& s, std::size_t q, std::size_t k, std::size_t v,
                            std::size_t out, std::size_t probs) {
  if (s.heads == 0 || s.dim % s.heads != 0) {
    throw std::invalid_argument("attention: heads must divide the feature dimension");
  }
  if (s.causal && s.q_len > s.kv_len) throw std::invalid_argument("attention: causal needs q_len <= kv_len");
  if (q != s.batch * s.q_len * s.dim || out != q || k != s.batch * s.kv_len * s.dim || v != k ||
      probs != s.batch * s.heads * s.q_len * s.kv_len) {
    throw std::invalid_argument("attention: buffer sizes do not match shape");
  }
}

inline void check_layer_norm(std::size_t rows, std::size_t dim, std::size_t x, std::size_t gain,
                             std::size_t bias, std::size_t y, std::size_t mean, std::size_t rstd) {
  if (x != rows * dim || y != x || gain != dim || bias != dim || mean != rows || rstd != rows) {
    throw std::invalid_argument("layer_norm: buffer sizes do not match shape");
  }
}

}  // namespace srforge::kernels
