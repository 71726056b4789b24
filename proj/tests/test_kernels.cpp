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

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "srforge/kernels/parallel.hpp"
#include "srforge/kernels/reference.hpp"
#include "srforge/parallel.hpp"

namespace srforge::kernels {
namespace {

template <class T>
std::vector<T> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<T> v(n);
  for (T& x : v) x = static_cast<T>(u(rng));
  return v;
}

template <class T>
double max_rel_diff(const std::vector<T>& a, const std::vector<T>& b) {
  REQUIRE(a.size() == b.size());
  double scale = 1e-30, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(static_cast<double>(a[i])));
    diff = std::max(diff, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  }
  return diff / scale;
}

template <class T>
ConstMatrix<T> cm(const std::vector<T>& v, std::size_t r, std::size_t c) {
  return {std::span<const T>(v), r, c};
}

template <class T>
Matrix<T> mm(std::vector<T>& v, std::size_t r, std::size_t c) {
  return {std::span<T>(v), r, c};
}

template <class T>
constexpr double kTol = sizeof(T) == 4 ? 1e-5 : 1e-12;

TEST_CASE_TEMPLATE("gemm matches the reference", T, float, double) {
  const std::array<std::size_t, 3> sizes[] = {{1, 1, 1}, {7, 5, 3}, {50, 64, 33}, {97, 130, 300}, {6, 32, 256}, {13, 257, 17}};
  for (auto [m, n, k] : sizes) {
    for (Op oa : {Op::kNone, Op::kTranspose}) {
      for (Op ob : {Op::kNone, Op::kTranspose}) {
        for (bool acc : {false, true}) {
          const auto a = random_vector<T>(m * k, 1);
          const auto b = random_vector<T>(k * n, 2);
          auto c_ref = random_vector<T>(m * n, 3);
          auto c_par = c_ref;
          const std::size_t ar = oa == Op::kNone ? m : k, ac = oa == Op::kNone ? k : m;
          const std::size_t br = ob == Op::kNone ? k : n, bc = ob == Op::kNone ? n : k;
          reference::gemm<T>(oa, ob, cm(a, ar, ac), cm(b, br, bc), mm(c_ref, m, n), acc);
          parallel::gemm<T>(oa, ob, cm(a, ar, ac), cm(b, br, bc), mm(c_par, m, n), acc);
          INFO(m, "x", n, "x", k, " ta=", oa == Op::kTranspose, " tb=", ob == Op::kTranspose, " acc=", acc);
          CHECK(max_rel_diff(c_ref, c_par) < kTol<T>);
        }
      }
    }
  }
}

TEST_CASE("gemm rejects inconsistent shapes") {
  std::vector<float> a(6), b(6), c(4);
  CHECK_THROWS_AS(parallel::gemm<float>(Op::kNone, Op::kNone, cm(a, 2, 3), cm(b, 2, 3), mm(c, 2, 2), false),
                  std::invalid_argument);
  CHECK_THROWS_AS(reference::gemm<float>(Op::kNone, Op::kNone, cm(a, 2, 3), cm(b, 3, 2), mm(c, 2, 3), false),
                  std::invalid_argument);
}

TEST_CASE_TEMPLATE("attention matches the reference", T, float, double) {
  for (bool causal : {false, true}) {
    AttentionShape s;
    s.batch = 3;
    s.q_len = causal ? 9 : 7;
    s.kv_len = causal ? 9 : 11;
    s.dim = 16;
    s.heads = 4;
    s.causal = causal;
    const auto q = random_vector<T>(s.batch * s.q_len * s.dim, 4);
    const auto k = random_vector<T>(s.batch * s.kv_len * s.dim, 5);
    const auto v = random_vector<T>(s.batch * s.kv_len * s.dim, 6);
    const auto dout = random_vector<T>(s.batch * s.q_len * s.dim, 7);
    std::vector<T> out_r(q.size()), out_p(q.size());
    std::vector<T> pr(s.batch * s.heads * s.q_len * s.kv_len), pp(pr.size());
    reference::attention_forward<T>(s, q, k, v, out_r, pr);
    parallel::attention_forward<T>(s, q, k, v, out_p, pp);
    CHECK(max_rel_diff(out_r, out_p) < kTol<T>);
    CHECK(max_rel_diff(pr, pp) < kTol<T>);
    for (std::size_t row = 0; row < s.batch * s.heads * s.q_len; ++row) {
      double sum = 0.0;
      for (std::size_t j = 0; j < s.kv_len; ++j) {
        const T p = pp[row * s.kv_len + j];
        CHECK(p >= T(0));
        if (causal && j > row % s.q_len) CHECK(p == T(0));
        sum += static_cast<double>(p);
      }
      CHECK(std::abs(sum - 1.0) < 1e-6);
    }
    std::vector<T> dq_r(q.size()), dk_r(k.size()), dv_r(v.size());
    std::vector<T> dq_p(q.size()), dk_p(k.size()), dv_p(v.size());
    reference::attention_backward<T>(s, q, k, v, pr, dout, dq_r, dk_r, dv_r);
    parallel::attention_backward<T>(s, q, k, v, pp, dout, dq_p, dk_p, dv_p);
    CHECK(max_rel_diff(dq_r, dq_p) < kTol<T>);
    CHECK(max_rel_diff(dk_r, dk_p) < kTol<T>);
    CHECK(max_rel_diff(dv_r, dv_p) < kTol<T>);
  }
}

TEST_CASE_TEMPLATE("layer norm matches the reference", T, float, double) {
  const std::size_t rows = 37, dim = 24;
  const auto x = random_vector<T>(rows * dim, 8);
  const auto gain = random_vector<T>(dim, 9);
  const auto bias = random_vector<T>(dim, 10);
  const auto dy = random_vector<T>(rows * dim, 11);
  std::vector<T> y_r(x.size()), y_p(x.size()), m_r(rows), m_p(rows), s_r(rows), s_p(rows);
  reference::layer_norm_forward<T>(rows, dim, x, gain, bias, T(1e-5), y_r, m_r, s_r);
  parallel::layer_norm_forward<T>(rows, dim, x, gain, bias, T(1e-5), y_p, m_p, s_p);
  CHECK(max_rel_diff(y_r, y_p) < kTol<T>);
  std::vector<T> dx_r(x.size()), dx_p(x.size()), dg_r(dim), dg_p(dim), db_r(dim), db_p(dim);
  reference::layer_norm_backward<T>(rows, dim, x, gain, m_r, s_r, dy, dx_r, dg_r, db_r);
  parallel::layer_norm_backward<T>(rows, dim, x, gain, m_p, s_p, dy, dx_p, dg_p, db_p);
  CHECK(max_rel_diff(dx_r, dx_p) < kTol<T>);
  CHECK(max_rel_diff(dg_r, dg_p) < kTol<T>);
  CHECK(max_rel_diff(db_r, db_p) < kTol<T>);
}

TEST_CASE("parallel kernels are bitwise stable across thread counts") {
  const std::size_t m = 130, n = 70, k = 90;
  const auto a = random_vector<float>(m * k, 12);
  const auto b = random_vector<float>(k * n, 13);
  const int saved = thread_count();
  std::vector<float> c1(m * n), c4(m * n);
  set_thread_count(1);
  parallel::gemm<float>(Op::kTranspose, Op::kNone, cm(a, k, m), cm(b, k, n), mm(c1, m, n), false);
  set_thread_count(4);
  parallel::gemm<float>(Op::kTranspose, Op::kNone, cm(a, k, m), cm(b, k, n), mm(c4, m, n), false);
  CHECK(c1 == c4);

  AttentionShape s;
  s.batch = 5;
  s.q_len = s.kv_len = 12;
  s.dim = 8;
  s.heads = 2;
  s.causal = true;
  const auto q = random_vector<float>(s.batch * s.q_len * s.dim, 14);
  std::vector<float> o1(q.size()), o4(q.size()), p1(s.batch * s.heads * 144), p4(p1.size());
  set_thread_count(1);
  parallel::attention_forward<float>(s, q, q, q, o1, p1);
  set_thread_count(4);
  parallel::attention_forward<float>(s, q, q, q, o4, p4);
  set_thread_count(saved);
  CHECK(o1 == o4);
  CHECK(p1 == p4);
}

}  // namespace
}  // namespace srforge::kernels
