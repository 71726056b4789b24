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

#include "srforge/kernels/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kernel_checks.hpp"

namespace srforge::kernels::reference {

template <class T>
void gemm(Op op_a, Op op_b, ConstMatrix<T> a, ConstMatrix<T> b, Matrix<T> c, bool accumulate) {
  const GemmDims dims = check_gemm(op_a, op_b, a, b, c);
  auto at = [&](std::size_t i, std::size_t p) {
    return op_a == Op::kNone ? a.data[i * a.cols + p] : a.data[p * a.cols + i];
  };
  auto bt = [&](std::size_t p, std::size_t j) {
    return op_b == Op::kNone ? b.data[p * b.cols + j] : b.data[j * b.cols + p];
  };
  for (std::size_t i = 0; i < dims.m; ++i) {
    for (std::size_t j = 0; j < dims.n; ++j) {
      T sum = accumulate ? c.data[i * c.cols + j] : T(0);
      for (std::size_t p = 0; p < dims.k; ++p) sum += at(i, p) * bt(p, j);
      c.data[i * c.cols + j] = sum;
    }
  }
}

template <class T>
void attention_forward(const AttentionShape& s, std::span<const T> q, std::span<const T> k,
                       std::span<const T> v, std::span<T> out, std::span<T> probs) {
  check_attention(s, q.size(), k.size(), v.size(), out.size(), probs.size());
  const std::size_t dh = s.head_dim();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  std::vector<T> scores(s.kv_len);
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t h = 0; h < s.heads; ++h) {
      for (std::size_t i = 0; i < s.q_len; ++i) {
        const std::size_t visible = s.causal ? std::min(i + 1, s.kv_len) : s.kv_len;
        const T* qi = &q[(b * s.q_len + i) * s.dim + h * dh];
        T max_score = -std::numeric_limits<T>::infinity();
        for (std::size_t j = 0; j < visible; ++j) {
          const T* kj = &k[(b * s.kv_len + j) * s.dim + h * dh];
          T dot = 0;
          for (std::size_t e = 0; e < dh; ++e) dot += qi[e] * kj[e];
          scores[j] = dot * scale;
          max_score = std::max(max_score, scores[j]);
        }
        T total = 0;
        for (std::size_t j = 0; j < visible; ++j) {
          scores[j] = std::exp(scores[j] - max_score);
          total += scores[j];
        }
        T* p = &probs[((b * s.heads + h) * s.q_len + i) * s.kv_len];
        for (std::size_t j = 0; j < s.kv_len; ++j) p[j] = j < visible ? scores[j] / total : T(0);
        T* oi = &out[(b * s.q_len + i) * s.dim + h * dh];
        for (std::size_t e = 0; e < dh; ++e) oi[e] = 0;
        for (std::size_t j = 0; j < visible; ++j) {
          const T* vj = &v[(b * s.kv_len + j) * s.dim + h * dh];
          for (std::size_t e = 0; e < dh; ++e) oi[e] += p[j] * vj[e];
        }
      }
    }
  }
}

template <class T>
void attention_backward(const AttentionShape& s, std::span<const T> q, std::span<const T> k,
                        std::span<const T> v, std::span<const T> probs, std::span<const T> d_out,
                        std::span<T> d_q, std::span<T> d_k, std::span<T> d_v) {
  check_attention(s, q.size(), k.size(), v.size(), d_out.size(), probs.size());
  check_attention(s, d_q.size(), d_k.size(), d_v.size(), d_out.size(), probs.size());
  const std::size_t dh = s.head_dim();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  std::fill(d_q.begin(), d_q.end(), T(0));
  std::fill(d_k.begin(), d_k.end(), T(0));
  std::fill(d_v.begin(), d_v.end(), T(0));
  std::vector<T> d_p(s.kv_len);
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t h = 0; h < s.heads; ++h) {
      for (std::size_t i = 0; i < s.q_len; ++i) {
        const std::size_t visible = s.causal ? std::min(i + 1, s.kv_len) : s.kv_len;
        const T* p = &probs[((b * s.heads + h) * s.q_len + i) * s.kv_len];
        const T* go = &d_out[(b * s.q_len + i) * s.dim + h * dh];
        const T* qi = &q[(b * s.q_len + i) * s.dim + h * dh];
        T weighted = 0;
        for (std::size_t j = 0; j < visible; ++j) {
          const T* vj = &v[(b * s.kv_len + j) * s.dim + h * dh];
          T* gvj = &d_v[(b * s.kv_len + j) * s.dim + h * dh];
          T dot = 0;
          for (std::size_t e = 0; e < dh; ++e) {
            dot += go[e] * vj[e];
            gvj[e] += p[j] * go[e];
          }
          d_p[j] = dot;
          weighted += p[j] * dot;
        }
        T* gqi = &d_q[(b * s.q_len + i) * s.dim + h * dh];
        for (std::size_t j = 0; j < visible; ++j) {
          const T ds = p[j] * (d_p[j] - weighted) * scale;
          const T* kj = &k[(b * s.kv_len + j) * s.dim + h * dh];
          T* gkj = &d_k[(b * s.kv_len + j) * s.dim + h * dh];
          for (std::size_t e = 0; e < dh; ++e) {
            gqi[e] += ds * kj[e];
            gkj[e] += ds * qi[e];
          }
        }
      }
    }
  }
}

template <class T>
void layer_norm_forward(std::size_t rows, std::size_t dim, std::span<const T> x,
                        std::span<const T> gain, std::span<const T> bias, T eps, std::span<T> y,
                        std::span<T> mean, std::span<T> rstd) {
  check_layer_norm(rows, dim, x.size(), gain.size(), bias.size(), y.size(), mean.size(), rstd.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = &x[r * dim];
    T mu = 0;
    for (std::size_t e = 0; e < dim; ++e) mu += xr[e];
    mu /= static_cast<T>(dim);
    T var = 0;
    for (std::size_t e = 0; e < dim; ++e) var += (xr[e] - mu) * (xr[e] - mu);
    var /= static_cast<T>(dim);
    const T inv = T(1) / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = inv;
    for (std::size_t e = 0; e < dim; ++e) y[r * dim + e] = (xr[e] - mu) * inv * gain[e] + bias[e];
  }
}

template <class T>
void layer_norm_backward(std::size_t rows, std::size_t dim, std::span<const T> x,
                         std::span<const T> gain, std::span<const T> mean, std::span<const T> rstd,
                         std::span<const T> d_y, std::span<T> d_x, std::span<T> d_gain,
                         std::span<T> d_bias) {
  check_layer_norm(rows, dim, x.size(), gain.size(), d_bias.size(), d_y.size(), mean.size(),
                   rstd.size());
  for (std::size_t r = 0; r < rows; ++r) {
    T sum_g = 0;
    T sum_gx = 0;
    for (std::size_t e = 0; e < dim; ++e) {
      const T xhat = (x[r * dim + e] - mean[r]) * rstd[r];
      const T g = d_y[r * dim + e] * gain[e];
      d_gain[e] += d_y[r * dim + e] * xhat;
      d_bias[e] += d_y[r * dim + e];
      sum_g += g;
      sum_gx += g * xhat;
    }
    sum_g /= static_cast<T>(dim);
    sum_gx /= static_cast<T>(dim);
    for (std::size_t e = 0; e < dim; ++e) {
      const T xhat = (x[r * dim + e] - mean[r]) * rstd[r];
      d_x[r * dim + e] = rstd[r] * (d_y[r * dim + e] * gain[e] - sum_g - xhat * sum_gx);
    }
  }
}

#define SRFORGE_INSTANTIATE(T)                                                                   \
  template void gemm<T>(Op, Op, ConstMatrix<T>, ConstMatrix<T>, Matrix<T>, bool);                \
  template void attention_forward<T>(const AttentionShape&, std::span<const T>,                  \
                                     std::span<const T>, std::span<const T>, std::span<T>,       \
                                     std::span<T>);                                              \
  template void attention_backward<T>(const AttentionShape&, std::span<const T>,                 \
                                      std::span<const T>, std::span<const T>, std::span<const T>, \
                                      std::span<const T>, std::span<T>, std::span<T>,            \
                                      std::span<T>);                                             \
  template void layer_norm_forward<T>(std::size_t, std::size_t, std::span<const T>,              \
                                      std::span<const T>, std::span<const T>, T, std::span<T>,   \
                                      std::span<T>, std::span<T>);                               \
  template void layer_norm_backward<T>(std::size_t, std::size_t, std::span<const T>,             \
                                       std::span<const T>, std::span<const T>,                   \
                                       std::span<const T>, std::span<const T>, std::span<T>,     \
                                       std::span<T>, std::span<T>);

SRFORGE_INSTANTIATE(float)
SRFORGE_INSTANTIATE(double)

}  // namespace srforge::kernels::reference
