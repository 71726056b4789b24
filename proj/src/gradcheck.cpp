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

#include "srforge/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "srforge/ops.hpp"
#include "srforge/train.hpp"

namespace srforge {
namespace {

struct Fixture {
  explicit Fixture(EncoderKind kind, std::uint64_t seed) : model(make_config(kind), seed) {
    // Biases start at zero and unused columns are zero, which puts ReLUs on
    // their kink. Offsets move the check to a differentiable point.
    Rng rng(derive_seed(seed, hash_name("gradcheck")));
    std::uniform_real_distribution<double> offset(-0.1, 0.1);
    for (Parameter& p : model.params().parameters()) {
      const bool zero = std::all_of(p.value.data().begin(), p.value.data().end(), [](real v) { return v == 0; });
      for (real& v : p.value.data()) {
        if (zero) v = static_cast<real>(offset(rng));
        v = static_cast<real>(static_cast<float>(v));
      }
    }
    const ModelConfig& cfg = model.config();
    std::uniform_real_distribution<float> xs(0.1f, 10.0f);
    std::uniform_real_distribution<float> ys(-5.0f, 5.0f);
    const char* truths[] = {"mul C x1", "add x2 sin mul C x1"};
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i].n_rows = cfg.n_rows;
      data[i].values.assign(cfg.n_rows * kTableCols, 0.0f);
      for (std::size_t r = 0; r < cfg.n_rows; ++r) {
        data[i].at(r, 0) = ys(rng);
        for (std::size_t c = 1; c <= 2; ++c) data[i].at(r, c) = xs(rng);
      }
      data[i].ground_truth = sequence_from_text(truths[i]);
    }
    const std::vector<const TabularDataset*> ptrs{&data[0], &data[1]};
    batch = make_batch(ptrs, cfg);
  }

  static ModelConfig make_config(EncoderKind kind) {
    ModelConfig cfg;
    cfg.d_model = 8;
    cfg.n_enc = 1;
    cfg.n_dec = 1;
    cfg.heads = 2;
    cfg.n_rows = 6;
    cfg.max_len = 8;
    cfg.encoder = kind;
    return cfg;
  }

  Var loss(Graph& g) {
    const Var memory = model.encode(g, batch.tables);
    const Var logits = model.decode(g, memory, batch.decoder_input, batch.batch, batch.len);
    return cross_entropy(g, logits, batch.targets, batch.keep, real(0.1));
  }

  double value() {
    Graph g(false, false);
    return static_cast<double>(g.value(loss(g))[0]);
  }

  Model model;
  std::array<TabularDataset, 2> data;
  Batch batch;
};

GradientSet analytic(EncoderKind kind, std::uint64_t seed) {
  Fixture f(kind, seed);
  ParameterStore& store = f.model.params();
  store.zero_grad();
  {
    Graph g(false, true);
    g.backward(f.loss(g));
  }
  GradientSet out;
  for (const Parameter& p : store.parameters()) out.push_back({p.name, {p.grad.data().begin(), p.grad.data().end()}});
  return out;
}

GradientSet numeric(EncoderKind kind, std::uint64_t seed, double h) {
  Fixture f(kind, seed);
  GradientSet out;
  for (Parameter& p : f.model.params().parameters()) {
    NamedGradient ng{p.name, std::vector<double>(p.value.size())};
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const real saved = p.value[i];
      const auto at = [&](double dx) {
        p.value[i] = static_cast<real>(saved + dx);
        return f.value();
      };
      ng.values[i] = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
      p.value[i] = saved;
    }
    out.push_back(std::move(ng));
  }
  return out;
}

}  // namespace

#ifdef SRFORGE_REAL_F64
GradientSet analytic_gradients_f64(EncoderKind kind, std::uint64_t seed) { return analytic(kind, seed); }
GradientSet numeric_gradients_f64(EncoderKind kind, std::uint64_t seed, double h) {
  return numeric(kind, seed, h);
}
#else
GradientSet analytic_gradients_f32(EncoderKind kind, std::uint64_t seed) { return analytic(kind, seed); }
GradientSet numeric_gradients_f32(EncoderKind kind, std::uint64_t seed, double h) {
  return numeric(kind, seed, h);
}
#endif

}  // namespace srforge
