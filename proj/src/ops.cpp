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

#include "srforge/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "srforge/kernels/parallel.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {
namespace {

namespace kp = kernels::parallel;
using kernels::Op;

std::size_t normalize_axis(int axis, int rank) {
  const int a = axis < 0 ? axis + rank : axis;
  if (a < 0 || a >= rank) throw ShapeError("axis out of range");
  return static_cast<std::size_t>(a);
}

std::size_t product(const Shape& s, std::size_t begin, std::size_t end) {
  std::size_t n = 1;
  for (std::size_t i = begin; i < end; ++i) n *= s[i];
  return n;
}

void accumulate(std::span<real> dst, std::span<const real> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

template <class T>
std::shared_ptr<std::vector<T>> shared_buffer(std::size_t n) {
  return std::make_shared<std::vector<T>>(n);
}

}  // namespace

Var linear(Graph& g, Var x, Var w, Var b) {
  const Tensor& xv = g.value(x);
  const Tensor& wv = g.value(w);
  if (wv.rank() != 2 || xv.rank() < 1 || xv.dim(-1) != wv.dim(0)) {
    throw ShapeError("linear: cannot apply " + shape_string(wv.shape()) + " to " +
                     shape_string(xv.shape()));
  }
  const std::size_t in = wv.dim(0);
  const std::size_t out = wv.dim(1);
  const std::size_t rows = xv.size() / in;
  Shape shape = xv.shape();
  shape.back() = out;
  Tensor y(shape);
  kp::gemm<real>(Op::kNone, Op::kNone, {xv.data(), rows, in}, {wv.data(), in, out},
                 {y.data(), rows, out}, false);
  if (b.valid()) {
    const Tensor& bv = g.value(b);
    if (bv.size() != out) throw ShapeError("linear: bias size mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
      real* yr = y.data().data() + r * out;
      for (std::size_t j = 0; j < out; ++j) yr[j] += bv[j];
    }
  }
  return g.emit(std::move(y), {x, w, b}, [x, w, b, rows, in, out](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    if (gr.requires_grad(x)) {
      kp::gemm<real>(Op::kNone, Op::kTranspose, {gy.data(), rows, out},
                     {gr.value(w).data(), in, out}, {gr.grad(x).data(), rows, in}, true);
    }
    if (gr.requires_grad(w)) {
      kp::gemm<real>(Op::kTranspose, Op::kNone, {gr.value(x).data(), rows, in},
                     {gy.data(), rows, out}, {gr.grad(w).data(), in, out}, true);
    }
    if (b.valid() && gr.requires_grad(b)) {
      auto gb = gr.grad(b).data();
      for (std::size_t r = 0; r < rows; ++r) {
        const real* row = gy.data().data() + r * out;
        for (std::size_t j = 0; j < out; ++j) gb[j] += row[j];
      }
    }
  });
}

Var relu(Graph& g, Var x) {
  const Tensor& xv = g.value(x);
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = xv[i] > real(0) ? xv[i] : real(0);
  return g.emit(std::move(y), {x}, [x](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    const Tensor& xv = gr.value(x);
    auto gx = gr.grad(x).data();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      if (xv[i] > real(0)) gx[i] += gy[i];
    }
  });
}

Var add(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  if (av.shape() != bv.shape()) {
    throw ShapeError("add: " + shape_string(av.shape()) + " vs " + shape_string(bv.shape()));
  }
  Tensor y(av.shape());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = av[i] + bv[i];
  return g.emit(std::move(y), {a, b}, [a, b](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    if (gr.requires_grad(a)) accumulate(gr.grad(a).data(), gy.data());
    if (gr.requires_grad(b)) accumulate(gr.grad(b).data(), gy.data());
  });
}

Var expand(Graph& g, Var x, int axis, std::size_t count) {
  const Tensor& xv = g.value(x);
  const int rank = xv.rank();
  const int a = axis < 0 ? axis + rank + 1 : axis;
  if (a < 0 || a > rank) throw ShapeError("expand: axis out of range");
  if (count == 0) throw ShapeError("expand: count must be positive");
  const std::size_t ua = static_cast<std::size_t>(a);
  const std::size_t outer = product(xv.shape(), 0, ua);
  const std::size_t inner = product(xv.shape(), ua, xv.shape().size());
  Shape shape = xv.shape();
  shape.insert(shape.begin() + a, count);
  Tensor y(shape);
  for (std::size_t o = 0; o < outer; ++o) {
    const real* src = xv.data().data() + o * inner;
    for (std::size_t c = 0; c < count; ++c) {
      std::copy(src, src + inner, y.data().data() + (o * count + c) * inner);
    }
  }
  return g.emit(std::move(y), {x}, [x, outer, count, inner](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    auto gx = gr.grad(x).data();
    for (std::size_t o = 0; o < outer; ++o) {
      real* dst = gx.data() + o * inner;
      for (std::size_t c = 0; c < count; ++c) {
        const real* src = gy.data().data() + (o * count + c) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
      }
    }
  });
}

Var concat_last(Graph& g, Var a, Var b) {
  const Tensor& av = g.value(a);
  const Tensor& bv = g.value(b);
  if (av.rank() < 1 || av.rank() != bv.rank() ||
      !std::equal(av.shape().begin(), av.shape().end() - 1, bv.shape().begin())) {
    throw ShapeError("concat: " + shape_string(av.shape()) + " vs " + shape_string(bv.shape()));
  }
  const std::size_t na = av.dim(-1);
  const std::size_t nb = bv.dim(-1);
  const std::size_t rows = na ? av.size() / na : bv.size() / nb;
  Shape shape = av.shape();
  shape.back() = na + nb;
  Tensor y(shape);
  for (std::size_t r = 0; r < rows; ++r) {
    real* dst = y.data().data() + r * (na + nb);
    std::copy_n(av.data().data() + r * na, na, dst);
    std::copy_n(bv.data().data() + r * nb, nb, dst + na);
  }
  return g.emit(std::move(y), {a, b}, [a, b, rows, na, nb](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    const bool ga = gr.requires_grad(a);
    const bool gb = gr.requires_grad(b);
    for (std::size_t r = 0; r < rows; ++r) {
      const real* src = gy.data().data() + r * (na + nb);
      if (ga) {
        real* d = gr.grad(a).data().data() + r * na;
        for (std::size_t j = 0; j < na; ++j) d[j] += src[j];
      }
      if (gb) {
        real* d = gr.grad(b).data().data() + r * nb;
        for (std::size_t j = 0; j < nb; ++j) d[j] += src[na + j];
      }
    }
  });
}

Var max_over(Graph& g, Var x, int axis) {
  const Tensor& xv = g.value(x);
  const std::size_t a = normalize_axis(axis, xv.rank());
  const std::size_t outer = product(xv.shape(), 0, a);
  const std::size_t len = xv.shape()[a];
  const std::size_t inner = product(xv.shape(), a + 1, xv.shape().size());
  if (len == 0) throw ShapeError("max_over: empty axis");
  Shape shape = xv.shape();
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(a));
  Tensor y(shape);
  auto arg = shared_buffer<std::uint32_t>(outer * inner);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const real* base = xv.data().data() + o * len * inner + i;
      std::uint32_t best = 0;
      for (std::size_t k = 1; k < len; ++k) {
        if (base[k * inner] > base[best * inner]) best = static_cast<std::uint32_t>(k);
      }
      y[o * inner + i] = base[best * inner];
      (*arg)[o * inner + i] = best;
    }
  }
  return g.emit(std::move(y), {x}, [x, arg, len, inner](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    auto gx = gr.grad(x).data();
    for (std::size_t n = 0; n < arg->size(); ++n) {
      const std::size_t o = n / inner;
      const std::size_t i = n % inner;
      gx[(o * len + (*arg)[n]) * inner + i] += gy[n];
    }
  });
}

Var reshape(Graph& g, Var x, Shape shape) {
  Tensor y = g.value(x).reshaped(std::move(shape));
  return g.emit(std::move(y), {x}, [x](Graph& gr, Var self) {
    accumulate(gr.grad(x).data(), gr.grad(self).data());
  });
}

Var layer_norm(Graph& g, Var x, Var gain, Var bias) {
  const Tensor& xv = g.value(x);
  const std::size_t dim = xv.dim(-1);
  if (g.value(gain).size() != dim || g.value(bias).size() != dim) {
    throw ShapeError("layer_norm: gain/bias size mismatch");
  }
  const std::size_t rows = xv.size() / dim;
  Tensor y(xv.shape());
  auto mean = shared_buffer<real>(rows);
  auto rstd = shared_buffer<real>(rows);
  kp::layer_norm_forward<real>(rows, dim, xv.data(), g.value(gain).data(), g.value(bias).data(),
                               kLayerNormEps, y.data(), *mean, *rstd);
  return g.emit(std::move(y), {x, gain, bias},
                [x, gain, bias, rows, dim, mean, rstd](Graph& gr, Var self) {
                  std::vector<real> dx(rows * dim);
                  std::vector<real> dgain(dim);
                  std::vector<real> dbias(dim);
                  kp::layer_norm_backward<real>(rows, dim, gr.value(x).data(),
                                                gr.value(gain).data(), *mean, *rstd,
                                                gr.grad(self).data(), dx, dgain, dbias);
                  if (gr.requires_grad(x)) accumulate(gr.grad(x).data(), dx);
                  if (gr.requires_grad(gain)) accumulate(gr.grad(gain).data(), dgain);
                  if (gr.requires_grad(bias)) accumulate(gr.grad(bias).data(), dbias);
                });
}

Var dropout(Graph& g, Var x, real p) {
  if (!(p >= real(0) && p < real(1))) throw std::invalid_argument("dropout rate must be in [0, 1)");
  if (!g.training() || p == real(0)) return x;
  const Tensor& xv = g.value(x);
  auto mask = shared_buffer<real>(xv.size());
  const real scale = real(1) / (real(1) - p);
  const double threshold = static_cast<double>(p);
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double u = static_cast<double>(g.rng()() >> 11) * 0x1.0p-53;
    (*mask)[i] = u < threshold ? real(0) : scale;
    y[i] = xv[i] * (*mask)[i];
  }
  return g.emit(std::move(y), {x}, [x, mask](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    auto gx = gr.grad(x).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * (*mask)[i];
  });
}

Var attention(Graph& g, Var q, Var k, Var v, std::size_t heads, bool causal) {
  const Tensor& qv = g.value(q);
  const Tensor& kv = g.value(k);
  const Tensor& vv = g.value(v);
  if (qv.rank() != 3 || kv.rank() != 3 || kv.shape() != vv.shape() || qv.dim(0) != kv.dim(0) ||
      qv.dim(2) != kv.dim(2)) {
    throw ShapeError("attention: q " + shape_string(qv.shape()) + ", k " +
                     shape_string(kv.shape()) + ", v " + shape_string(vv.shape()));
  }
  kernels::AttentionShape s;
  s.batch = qv.dim(0);
  s.q_len = qv.dim(1);
  s.kv_len = kv.dim(1);
  s.dim = qv.dim(2);
  s.heads = heads;
  s.causal = causal;
  Tensor y(qv.shape());
  auto probs = shared_buffer<real>(s.batch * s.heads * s.q_len * s.kv_len);
  kp::attention_forward<real>(s, qv.data(), kv.data(), vv.data(), y.data(), *probs);
  return g.emit(std::move(y), {q, k, v}, [q, k, v, s, probs](Graph& gr, Var self) {
    std::vector<real> dq(gr.value(q).size());
    std::vector<real> dk(gr.value(k).size());
    std::vector<real> dv(gr.value(v).size());
    kp::attention_backward<real>(s, gr.value(q).data(), gr.value(k).data(), gr.value(v).data(),
                                 *probs, gr.grad(self).data(), dq, dk, dv);
    if (gr.requires_grad(q)) accumulate(gr.grad(q).data(), dq);
    if (gr.requires_grad(k)) accumulate(gr.grad(k).data(), dk);
    if (gr.requires_grad(v)) accumulate(gr.grad(v).data(), dv);
  });
}

Var embedding(Graph& g, Var table, std::span<const int> ids, std::size_t batch, std::size_t len) {
  const Tensor& tv = g.value(table);
  if (tv.rank() != 2) throw ShapeError("embedding table must be rank 2");
  if (ids.size() != batch * len) throw ShapeError("embedding: id count mismatch");
  const std::size_t vocab = tv.dim(0);
  const std::size_t d = tv.dim(1);
  auto saved = std::make_shared<std::vector<int>>(ids.begin(), ids.end());
  Tensor y({batch, len, d});
  for (std::size_t n = 0; n < ids.size(); ++n) {
    if (ids[n] < 0 || static_cast<std::size_t>(ids[n]) >= vocab) {
      throw std::out_of_range("embedding id out of range: " + std::to_string(ids[n]));
    }
    std::copy_n(tv.data().data() + static_cast<std::size_t>(ids[n]) * d, d,
                y.data().data() + n * d);
  }
  return g.emit(std::move(y), {table}, [table, saved, d](Graph& gr, Var self) {
    const Tensor& gy = gr.grad(self);
    auto gt = gr.grad(table).data();
    for (std::size_t n = 0; n < saved->size(); ++n) {
      real* dst = gt.data() + static_cast<std::size_t>((*saved)[n]) * d;
      const real* src = gy.data().data() + n * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
  });
}

Var cross_entropy(Graph& g, Var logits, std::span<const int> targets,
                  std::span<const std::uint8_t> keep, real eps) {
  const Tensor& lv = g.value(logits);
  if (lv.rank() != 2) throw ShapeError("cross_entropy: logits must be [N, v]");
  const std::size_t n = lv.dim(0);
  const std::size_t v = lv.dim(1);
  if (targets.size() != n || keep.size() != n) throw ShapeError("cross_entropy: target count");
  if (!(eps >= real(0) && eps < real(1))) throw std::invalid_argument("smoothing outside [0, 1)");
  std::size_t kept = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (!keep[r]) continue;
    if (targets[r] < 0 || static_cast<std::size_t>(targets[r]) >= v) {
      throw std::out_of_range("cross_entropy target out of range");
    }
    ++kept;
  }
  if (kept == 0) throw std::invalid_argument("cross_entropy: no kept rows");
  const double off = static_cast<double>(eps) / static_cast<double>(v);
  const double on = 1.0 - static_cast<double>(eps) + off;
  auto probs = shared_buffer<real>(n * v);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (!keep[r]) continue;
    const real* row = lv.data().data() + r * v;
    const double mx = *std::max_element(row, row + v);
    double z = 0.0;
    for (std::size_t c = 0; c < v; ++c) z += std::exp(static_cast<double>(row[c]) - mx);
    const double lse = mx + std::log(z);
    for (std::size_t c = 0; c < v; ++c) {
      const double logp = static_cast<double>(row[c]) - lse;
      (*probs)[r * v + c] = static_cast<real>(std::exp(logp));
      const double q = static_cast<std::size_t>(targets[r]) == c ? on : off;
      total -= q * logp;
    }
  }
  Tensor y(Shape{}, real(total / static_cast<double>(kept)));
  auto tg = std::make_shared<std::vector<int>>(targets.begin(), targets.end());
  auto kp_mask = std::make_shared<std::vector<std::uint8_t>>(keep.begin(), keep.end());
  return g.emit(std::move(y), {logits},
                [logits, probs, tg, kp_mask, n, v, on, off, kept](Graph& gr, Var self) {
                  const double scale = static_cast<double>(gr.grad(self)[0]) /
                                       static_cast<double>(kept);
                  auto gl = gr.grad(logits).data();
                  for (std::size_t r = 0; r < n; ++r) {
                    if (!(*kp_mask)[r]) continue;
                    for (std::size_t c = 0; c < v; ++c) {
                      const double q = static_cast<std::size_t>((*tg)[r]) == c ? on : off;
                      gl[r * v + c] +=
                          static_cast<real>((static_cast<double>((*probs)[r * v + c]) - q) * scale);
                    }
                  }
                });
}

Var weighted_sum(Graph& g, Var x, const Tensor& weights) {
  const Tensor& xv = g.value(x);
  if (xv.shape() != weights.shape()) throw ShapeError("weighted_sum: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    s += static_cast<double>(xv[i]) * static_cast<double>(weights[i]);
  }
  auto w = std::make_shared<Tensor>(weights);
  return g.emit(Tensor(Shape{}, real(s)), {x}, [x, w](Graph& gr, Var self) {
    const real gy = gr.grad(self)[0];
    auto gx = gr.grad(x).data();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy * (*w)[i];
  });
}

Tensor sinusoidal_positional_encoding(std::size_t len, std::size_t d) {
  Tensor pe({len, d});
  for (std::size_t pos = 0; pos < len; ++pos) {
    for (std::size_t j = 0; j < d; ++j) {
      const double expo = static_cast<double>(j - j % 2) / static_cast<double>(d);
      const double angle = static_cast<double>(pos) / std::pow(10000.0, expo);
      pe[pos * d + j] = static_cast<real>(j % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return pe;
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
