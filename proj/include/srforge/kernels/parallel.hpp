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

#include "srforge/kernels/common.hpp"

// Cache-blocked kernels, OpenMP over independent outputs.
namespace srforge::kernels::parallel {

/// c = op(a) * op(b), or c += op(a) * op(b) when `accumulate` is set.
template <class T>
void gemm(Op op_a, Op op_b, ConstMatrix<T> a, ConstMatrix<T> b, Matrix<T> c, bool accumulate);

template <class T>
void attention_forward(const AttentionShape& s, std::span<const T> q, std::span<const T> k,
                       std::span<const T> v, std::span<T> out, std::span<T> probs);

/// Overwrites d_q, d_k and d_v.
template <class T>
void attention_backward(const AttentionShape& s, std::span<const T> q, std::span<const T> k,
                        std::span<const T> v, std::span<const T> probs,
                        std::span<const T> d_out, std::span<T> d_q, std::span<T> d_k,
                        std::span<T> d_v);

/// Normalizes each row of x [rows, dim]; saves mean and 1/stddev per row.
template <class T>
void layer_norm_forward(std::size_t rows, std::size_t dim, std::span<const T> x,
                        std::span<const T> gain, std::span<const T> bias, T eps,
                        std::span<T> y, std::span<T> mean, std::span<T> rstd);

/// Overwrites d_x; accumulates into d_gain and d_bias.
template <class T>
void layer_norm_backward(std::size_t rows, std::size_t dim, std::span<const T> x,
                         std::span<const T> gain, std::span<const T> mean,
                         std::span<const T> rstd, std::span<const T> d_y, std::span<T> d_x,
                         std::span<T> d_gain, std::span<T> d_bias);

}  // namespace srforge::kernels::parallel
