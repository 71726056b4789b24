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

#include "srforge/kernels/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kernel_checks.hpp"

namespace srforge::kernels::parallel {
namespace {

// Register tile: kRows x kCols accumulators stay in vector registers for the
// whole k loop. kCols spans two 512-bit vectors of T.
template <class T>
struct Tile {
  static constexpr std::size_t kRows = 6;
  static constexpr std::size_t kCols = 128 / sizeof(T);
};

constexpr std::size_t kDepthBlock = 256;  // k block kept hot in L2
constexpr std::size_t kRowPanel = 48;     // rows per scheduling unit

template <class T>
void micro_tile(std::size_t depth, const T* a, std::size_t lda, const T* b, std::size_t ldb, T* c,
                std::size_t ldc, bool load) {
  constexpr std::size_t R = Tile<T>::kRows;
  constexpr std::size_t C = Tile<T>::kCols;
  T acc[R][C];
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < C; ++j) acc[r][j] = load ? c[r * ldc + j] : T(0);
  }
  for (std::size_t p = 0; p < depth; ++p) {
    const T* bp = b + p * ldb;
    for (std::size_t r = 0; r < R; ++r) {
      const T av = a[r * lda + p];
      for (std::size_t j = 0; j < C; ++j) acc[r][j] += av * bp[j];
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < C; ++j) c[r * ldc + j] = acc[r][j];
  }
}

// Ragged edge of the output: any tile size up to the register tile.
template <class T>
void edge_tile(std::size_t rows, std::size_t cols, std::size_t depth, const T* a, std::size_t lda,
               const T* b, std::size_t ldb, T* c, std::size_t ldc, bool load) {
  constexpr std::size_t C = Tile<T>::kCols;
  T acc[C];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) acc[j] = load ? c[r * ldc + j] : T(0);
    for (std::size_t p = 0; p < depth; ++p) {
      const T av = a[r * lda + p];
      const T* bp = b + p * ldb;
      for (std::size_t j = 0; j < cols; ++j) acc[j] += av * bp[j];
    }
    for (std::size_t j = 0; j < cols; ++j) c[r * ldc + j] = acc[j];
  }
}

template <class T>
void transpose_into(const T* src, std::size_t rows, std::size_t cols, std::vector<T>& dst) {
  dst.resize(rows * cols);
  constexpr std::size_t kB = 32;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ib = 0; ib < static_cast<std::ptrdiff_t>(rows); ib += kB) {
    const auto i0 = static_cast<std::size_t>(ib);
    for (std::size_t j0 = 0; j0 < cols; j0 += kB) {
      for (std::size_t i = i0; i < std::min(rows, i0 + kB); ++i) {
        for (std::size_t j = j0; j < std::min(cols, j0 + kB); ++j) dst[j * rows + i] = src[i * cols + j];
      }
    }
  }
}

// c[m x n] (+)= a[m x k] * b[k x n], all contiguous.
template <class T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c,
             bool accumulate) {
  constexpr std::size_t R = Tile<T>::kRows;
  constexpr std::size_t C = Tile<T>::kCols;
  if (k == 0) {
    if (!accumulate) std::fill(c, c + m * n, T(0));
    return;
  }
  const std::size_t panels = (m + kRowPanel - 1) / kRowPanel;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t panel = 0; panel < static_cast<std::ptrdiff_t>(panels); ++panel) {
    const std::size_t i_begin = static_cast<std::size_t>(panel) * kRowPanel;
    const std::size_t i_end = std::min(m, i_begin + kRowPanel);
    for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
      const std::size_t depth = std::min(kDepthBlock, k - p0);
      const bool load = accumulate || p0 > 0;
      for (std::size_t i = i_begin; i < i_end; i += R) {
        const std::size_t rows = std::min(R, i_end - i);
        for (std::size_t j = 0; j < n; j += C) {
          const std::size_t cols = std::min(C, n - j);
          const T* ap = a + i * k + p0;
          const T* bp = b + p0 * n + j;
          T* cp = c + i * n + j;
          if (rows == R && cols == C) {
            micro_tile(depth, ap, k, bp, n, cp, n, load);
          } else {
            edge_tile(rows, cols, depth, ap, k, bp, n, cp, n, load);
          }
        }
      }
    }
  }
}

}  // namespace

template <class T>
void gemm(Op op_a, Op op_b, ConstMatrix<T> a, ConstMatrix<T> b, Matrix<T> c, bool accumulate) {
  const GemmDims d = check_gemm(op_a, op_b, a, b, c);
  thread_local std::vector<T> a_packed;
  thread_local std::vector<T> b_packed;
  const T* ap = a.data.data();
  const T* bp = b.data.data();
  if (op_a == Op::kTranspose) {
    transpose_into(ap, a.rows, a.cols, a_packed);
    ap = a_packed.data();
  }
  if (op_b == Op::kTranspose) {
    transpose_into(bp, b.rows, b.cols, b_packed);
    bp = b_packed.data();
  }
  gemm_nn(d.m, d.n, d.k, ap, bp, c.data.data(), accumulate);
}

template <class T>
void attention_forward(const AttentionShape& s, std::span<const T> q, std::span<const T> k,
                       std::span<const T> v, std::span<T> out, std::span<T> probs) {
  check_attention(s, q.size(), k.size(), v.size(), out.size(), probs.size());
  const std::size_t dh = s.head_dim();
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  const auto units = static_cast<std::ptrdiff_t>(s.batch * s.heads);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t u = 0; u < units; ++u) {
    const std::size_t b = static_cast<std::size_t>(u) / s.heads;
    const std::size_t h = static_cast<std::size_t>(u) % s.heads;
    const T* qb = q.data() + b * s.q_len * s.dim + h * dh;
    const T* kb = k.data() + b * s.kv_len * s.dim + h * dh;
    const T* vb = v.data() + b * s.kv_len * s.dim + h * dh;
    T* ob = out.data() + b * s.q_len * s.dim + h * dh;
    for (std::size_t i = 0; i < s.q_len; ++i) {
      const std::size_t visible = s.causal ? std::min(i + 1, s.kv_len) : s.kv_len;
      const T* qi = qb + i * s.dim;
      T* p = probs.data() + (static_cast<std::size_t>(u) * s.q_len + i) * s.kv_len;
      T max_score = -std::numeric_limits<T>::infinity();
      for (std::size_t j = 0; j < visible; ++j) {
        const T* kj = kb + j * s.dim;
        T dot = 0;
        for (std::size_t e = 0; e < dh; ++e) dot += qi[e] * kj[e];
        p[j] = dot * scale;
        max_score = std::max(max_score, p[j]);
      }
      T total = 0;
      for (std::size_t j = 0; j < visible; ++j) {
        p[j] = std::exp(p[j] - max_score);
        total += p[j];
      }
      const T inv_total = T(1) / total;
      for (std::size_t j = 0; j < visible; ++j) p[j] *= inv_total;
      for (std::size_t j = visible; j < s.kv_len; ++j) p[j] = 0;
      T* oi = ob + i * s.dim;
      for (std::size_t e = 0; e < dh; ++e) oi[e] = 0;
      for (std::size_t j = 0; j < visible; ++j) {
        const T pj = p[j];
        const T* vj = vb + j * s.dim;
        for (std::size_t e = 0; e < dh; ++e) oi[e] += pj * vj[e];
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
  const auto units = static_cast<std::ptrdiff_t>(s.batch * s.heads);
#pragma omp parallel
  {
    std::vector<T> d_p(s.kv_len);
#pragma omp for schedule(static)
    for (std::ptrdiff_t u = 0; u < units; ++u) {
      const std::size_t b = static_cast<std::size_t>(u) / s.heads;
      const std::size_t h = static_cast<std::size_t>(u) % s.heads;
      const std::size_t q_off = b * s.q_len * s.dim + h * dh;
      const std::size_t kv_off = b * s.kv_len * s.dim + h * dh;
      for (std::size_t i = 0; i < s.q_len; ++i) {
        for (std::size_t e = 0; e < dh; ++e) d_q[q_off + i * s.dim + e] = 0;
      }
      for (std::size_t j = 0; j < s.kv_len; ++j) {
        for (std::size_t e = 0; e < dh; ++e) {
          d_k[kv_off + j * s.dim + e] = 0;
          d_v[kv_off + j * s.dim + e] = 0;
        }
      }
      for (std::size_t i = 0; i < s.q_len; ++i) {
        const std::size_t visible = s.causal ? std::min(i + 1, s.kv_len) : s.kv_len;
        const T* p = probs.data() + (static_cast<std::size_t>(u) * s.q_len + i) * s.kv_len;
        const T* go = d_out.data() + q_off + i * s.dim;
        const T* qi = q.data() + q_off + i * s.dim;
        T weighted = 0;
        for (std::size_t j = 0; j < visible; ++j) {
          const T* vj = v.data() + kv_off + j * s.dim;
          T* gvj = d_v.data() + kv_off + j * s.dim;
          const T pj = p[j];
          T dot = 0;
          for (std::size_t e = 0; e < dh; ++e) {
            dot += go[e] * vj[e];
            gvj[e] += pj * go[e];
          }
          d_p[j] = dot;
          weighted += pj * dot;
        }
        T* gqi = d_q.data() + q_off + i * s.dim;
        for (std::size_t j = 0; j < visible; ++j) {
          const T ds = p[j] * (d_p[j] - weighted) * scale;
          const T* kj = k.data() + kv_off + j * s.dim;
          T* gkj = d_k.data() + kv_off + j * s.dim;
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
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(rows); ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const T* xr = x.data() + r * dim;
    T mu = 0;
    for (std::size_t e = 0; e < dim; ++e) mu += xr[e];
    mu /= static_cast<T>(dim);
    T var = 0;
    for (std::size_t e = 0; e < dim; ++e) var += (xr[e] - mu) * (xr[e] - mu);
    var /= static_cast<T>(dim);
    const T inv = T(1) / std::sqrt(var + eps);
    mean[r] = mu;
    rstd[r] = inv;
    T* yr = y.data() + r * dim;
    for (std::size_t e = 0; e < dim; ++e) yr[e] = (xr[e] - mu) * inv * gain[e] + bias[e];
  }
}

template <class T>
void layer_norm_backward(std::size_t rows, std::size_t dim, std::span<const T> x,
                         std::span<const T> gain, std::span<const T> mean, std::span<const T> rstd,
                         std::span<const T> d_y, std::span<T> d_x, std::span<T> d_gain,
                         std::span<T> d_bias) {
  check_layer_norm(rows, dim, x.size(), gain.size(), d_bias.size(), d_y.size(), mean.size(),
                   rstd.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(rows); ++rr) {
    const auto r = static_cast<std::size_t>(rr);
    const T* xr = x.data() + r * dim;
    const T* gy = d_y.data() + r * dim;
    T sum_g = 0;
    T sum_gx = 0;
    for (std::size_t e = 0; e < dim; ++e) {
      const T g = gy[e] * gain[e];
      sum_g += g;
      sum_gx += g * (xr[e] - mean[r]) * rstd[r];
    }
    sum_g /= static_cast<T>(dim);
    sum_gx /= static_cast<T>(dim);
    T* gx = d_x.data() + r * dim;
    for (std::size_t e = 0; e < dim; ++e) {
      const T xhat = (xr[e] - mean[r]) * rstd[r];
      gx[e] = rstd[r] * (gy[e] * gain[e] - sum_g - xhat * sum_gx);
    }
  }
  // Column reductions: each feature is summed over rows by one thread.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ee = 0; ee < static_cast<std::ptrdiff_t>(dim); ++ee) {
    const auto e = static_cast<std::size_t>(ee);
    T g = 0;
    T bsum = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      const T gy = d_y[r * dim + e];
      g += gy * (x[r * dim + e] - mean[r]) * rstd[r];
      bsum += gy;
    }
    d_gain[e] += g;
    d_bias[e] += bsum;
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

}  // namespace srforge::kernels::parallel
