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

// Serial reference kernels against their OpenMP counterparts at the shapes
// the model uses. Parallel variants take the thread count as the last
// argument.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "srforge/kernels/parallel.hpp"
#include "srforge/kernels/reference.hpp"
#include "srforge/parallel.hpp"

namespace {

namespace k = srforge::kernels;

std::vector<float> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (float& x : v) x = u(rng);
  return v;
}

struct Reference {
  static constexpr auto gemm = k::reference::gemm<float>;
  static constexpr auto attention_forward = k::reference::attention_forward<float>;
  static constexpr auto attention_backward = k::reference::attention_backward<float>;
  static constexpr auto layer_norm_forward = k::reference::layer_norm_forward<float>;
};

struct Parallel {
  static constexpr auto gemm = k::parallel::gemm<float>;
  static constexpr auto attention_forward = k::parallel::attention_forward<float>;
  static constexpr auto attention_backward = k::parallel::attention_backward<float>;
  static constexpr auto layer_norm_forward = k::parallel::layer_norm_forward<float>;
};

void set_threads(benchmark::State& state, std::size_t arg) {
  srforge::set_thread_count(state.range(static_cast<int>(arg)) > 0 ? static_cast<int>(state.range(static_cast<int>(arg))) : 1);
}

// rows x inner times inner x cols.
template <class K>
void BM_Gemm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto p = static_cast<std::size_t>(state.range(2));
  set_threads(state, 3);
  const auto a = random_vector(m * n, 1), b = random_vector(n * p, 2);
  std::vector<float> c(m * p);
  for (auto _ : state) {
    K::gemm(k::Op::kNone, k::Op::kNone, {a, m, n}, {b, n, p}, {c, m, p}, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["GFLOPS"] =
      benchmark::Counter(2.0 * static_cast<double>(m * n * p), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
}

template <class K>
void BM_GemmTransposedA(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto p = static_cast<std::size_t>(state.range(2));
  set_threads(state, 3);
  const auto a = random_vector(n * m, 1), b = random_vector(n * p, 2);
  std::vector<float> c(m * p);
  for (auto _ : state) {
    K::gemm(k::Op::kTranspose, k::Op::kNone, {a, n, m}, {b, n, p}, {c, m, p}, true);
    benchmark::DoNotOptimize(c.data());
  }
  state.counters["GFLOPS"] =
      benchmark::Counter(2.0 * static_cast<double>(m * n * p), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
}

k::AttentionShape attention_shape(const benchmark::State& state) {
  k::AttentionShape s;
  s.batch = static_cast<std::size_t>(state.range(0));
  s.q_len = s.kv_len = static_cast<std::size_t>(state.range(1));
  s.dim = static_cast<std::size_t>(state.range(2));
  s.heads = 4;
  s.causal = s.q_len > 7;
  return s;
}

template <class K>
void BM_AttentionForward(benchmark::State& state) {
  const k::AttentionShape s = attention_shape(state);
  set_threads(state, 3);
  const std::size_t n = s.batch * s.q_len * s.dim;
  const auto q = random_vector(n, 1), kk = random_vector(n, 2), v = random_vector(n, 3);
  std::vector<float> out(n), probs(s.batch * s.heads * s.q_len * s.kv_len);
  for (auto _ : state) {
    K::attention_forward(s, q, kk, v, out, probs);
    benchmark::DoNotOptimize(out.data());
  }
}

template <class K>
void BM_AttentionBackward(benchmark::State& state) {
  const k::AttentionShape s = attention_shape(state);
  set_threads(state, 3);
  const std::size_t n = s.batch * s.q_len * s.dim;
  const auto q = random_vector(n, 1), kk = random_vector(n, 2), v = random_vector(n, 3), dy = random_vector(n, 4);
  std::vector<float> out(n), probs(s.batch * s.heads * s.q_len * s.kv_len), dq(n), dk(n), dv(n);
  K::attention_forward(s, q, kk, v, out, probs);
  for (auto _ : state) {
    K::attention_backward(s, q, kk, v, probs, dy, dq, dk, dv);
    benchmark::DoNotOptimize(dq.data());
  }
}

template <class K>
void BM_LayerNorm(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  set_threads(state, 2);
  const auto x = random_vector(rows * dim, 1);
  const std::vector<float> gain(dim, 1.0f), bias(dim, 0.0f);
  std::vector<float> y(rows * dim), mean(rows), rstd(rows);
  for (auto _ : state) {
    K::layer_norm_forward(rows, dim, x, gain, bias, 1e-5f, y, mean, rstd);
    benchmark::DoNotOptimize(y.data());
  }
}

// Shapes: encoder cells of a desk batch (64 x 50 x 7 rows at d 64), the same
// at full width (d 256), and decoder positions (64 x 30) into the vocabulary.
void gemm_args(benchmark::internal::Benchmark* b) {
  for (int t : {1, 2, 4}) {
    b->Args({22400, 64, 64, t});
    b->Args({3200, 256, 256, t});
    b->Args({1920, 64, 20, t});
  }
  b->ArgNames({"m", "k", "n", "threads"});
}

void attention_args(benchmark::internal::Benchmark* b) {
  for (int t : {1, 2, 4}) {
    b->Args({3200, 7, 64, t});
    b->Args({64, 50, 64, t});
    b->Args({64, 30, 256, t});
  }
  b->ArgNames({"seqs", "len", "dim", "threads"});
}

void norm_args(benchmark::internal::Benchmark* b) {
  for (int t : {1, 2, 4}) b->Args({22400, 64, t});
  b->ArgNames({"rows", "dim", "threads"});
}

BENCHMARK(BM_Gemm<Reference>)->Apply(gemm_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Gemm<Parallel>)->Apply(gemm_args)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_GemmTransposedA<Reference>)->Apply(gemm_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GemmTransposedA<Parallel>)->Apply(gemm_args)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_AttentionForward<Reference>)->Apply(attention_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AttentionForward<Parallel>)->Apply(attention_args)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_AttentionBackward<Reference>)->Apply(attention_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AttentionBackward<Parallel>)->Apply(attention_args)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_LayerNorm<Reference>)->Apply(norm_args)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LayerNorm<Parallel>)->Apply(norm_args)->Unit(benchmark::kMicrosecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
