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

#include "srforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srforge/expr_tree.hpp"
#include "srforge/ops.hpp"
#include "srforge/rng.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {
namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Model::Model(ModelConfig cfg, std::uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t d = cfg_.d_model;
  const std::size_t c = cfg_.d_cols;
  embed_ = &params_.add("embed.w", {cfg_.vocab, d});
  cell1_ = add_linear("enc.cell.l1", 1, d);
  cell2_ = add_linear("enc.cell.l2", d, d);
  for (std::size_t i = 0; i < cfg_.n_enc; ++i) {
    const std::string p = "enc.layer" + std::to_string(i);
    switch (cfg_.encoder) {
      case EncoderKind::kMlp:
        mlp_layers_.push_back({add_linear(p + ".mlp1.l1", d, d / 2), add_linear(p + ".mlp1.l2", d / 2, d / 2),
                               add_linear(p + ".mlp2.l1", d, d / 2), add_linear(p + ".mlp2.l2", d / 2, d / 2)});
        break;
      case EncoderKind::kAtt:
        att_layers_.push_back({add_attention(p + ".attn"), add_norm(p + ".norm")});
        break;
      case EncoderKind::kMix:
        mix_layers_.push_back({add_linear(p + ".flat.l1", c * d, d), add_linear(p + ".flat.l2", d, d),
                               add_attention(p + ".attn"), add_norm(p + ".norm")});
        break;
    }
  }
  last_ = add_linear("enc.last", d, d);
  for (std::size_t i = 0; i < cfg_.n_dec; ++i) {
    const std::string p = "dec.layer" + std::to_string(i);
    DecoderLayer layer;
    layer.self_attn = add_attention(p + ".self");
    layer.cross_attn = add_attention(p + ".cross");
    layer.ff1 = add_linear(p + ".ff.l1", d, 2 * d);
    layer.ff2 = add_linear(p + ".ff.l2", 2 * d, d);
    layer.n1 = add_norm(p + ".norm1");
    layer.n2 = add_norm(p + ".norm2");
    layer.n3 = add_norm(p + ".norm3");
    dec_layers_.push_back(layer);
  }
  out_ = add_linear("dec.out", d, cfg_.vocab);
  positional_ = sinusoidal_positional_encoding(cfg_.max_len, d);
  initialize(init_seed);
}

LinearParams Model::add_linear(const std::string& name, std::size_t in, std::size_t out, bool bias) {
  LinearParams p;
  p.w = &params_.add(name + ".w", {in, out});
  if (bias) p.b = &params_.add(name + ".b", {out});
  return p;
}

NormParams Model::add_norm(const std::string& name) {
  return {&params_.add(name + ".gain", {cfg_.d_model}), &params_.add(name + ".bias", {cfg_.d_model})};
}

AttentionParams Model::add_attention(const std::string& name) {
  const std::size_t d = cfg_.d_model;
  return {add_linear(name + ".q", d, d), add_linear(name + ".k", d, d), add_linear(name + ".v", d, d),
          add_linear(name + ".o", d, d)};
}

void Model::initialize(std::uint64_t seed) {
  Rng rng(derive_seed(seed, hash_name("init")));
  for (auto& p : params_.parameters()) {
    if (ends_with(p.name, ".gain")) {
      p.value.fill(real(1));
    } else if (ends_with(p.name, ".w")) {
      const double bound = std::sqrt(1.0 / static_cast<double>(p.value.dim(0)));
      for (real& x : p.value.data()) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x = static_cast<real>((2.0 * u - 1.0) * bound);
      }
    } else {
      p.value.fill(real(0));
    }
  }
}

Var Model::apply(Graph& g, const LinearParams& p, Var x) {
  return linear(g, x, g.parameter(*p.w), p.b ? g.parameter(*p.b) : Var{});
}

Var Model::apply(Graph& g, const NormParams& p, Var x) {
  return layer_norm(g, x, g.parameter(*p.gain), g.parameter(*p.bias));
}

Var Model::apply(Graph& g, const AttentionParams& p, Var q_in, Var kv_in, bool causal) {
  const Var q = apply(g, p.q, q_in);
  const Var k = apply(g, p.k, kv_in);
  const Var v = apply(g, p.v, kv_in);
  return apply(g, p.o, attention(g, q, k, v, cfg_.heads, causal));
}

Var Model::cell_mlp(Graph& g, Var tables) {
  const Shape& s = g.value(tables).shape();
  if (s.size() != 3 || s[2] != cfg_.d_cols) {
    throw ShapeError("tables must be [B, n, " + std::to_string(cfg_.d_cols) + "], got " + shape_string(s));
  }
  const Var cells = reshape(g, tables, {s[0], s[1], s[2], 1});
  return apply(g, cell2_, relu(g, apply(g, cell1_, cells)));
}

Var Model::encoder_layer(Graph& g, std::size_t layer, Var x) {
  const Shape s = g.value(x).shape();
  const std::size_t batch = s[0], rows = s[1], cols = s[2], d = s[3];
  const real p = static_cast<real>(cfg_.p_drop);
  switch (cfg_.encoder) {
    case EncoderKind::kMlp: {
      const MlpLayer& l = mlp_layers_.at(layer);
      const Var h1 = apply(g, l.a2, relu(g, apply(g, l.a1, x)));
      const Var x1 = concat_last(g, h1, expand(g, max_over(g, h1, 1), 1, rows));
      const Var h2 = apply(g, l.b2, relu(g, apply(g, l.b1, x1)));
      return concat_last(g, h2, expand(g, max_over(g, h2, 2), 2, cols));
    }
    case EncoderKind::kAtt: {
      const AttLayer& l = att_layers_.at(layer);
      const Var seq = reshape(g, x, {batch * rows, cols, d});
      const Var a = dropout(g, apply(g, l.attn, seq, seq, false), p);
      return reshape(g, apply(g, l.norm, add(g, seq, a)), s);
    }
    case EncoderKind::kMix: {
      const MixLayer& l = mix_layers_.at(layer);
      const Var flat = reshape(g, x, {batch, rows, cols * d});
      const Var f = apply(g, l.f2, relu(g, apply(g, l.f1, flat)));
      const Var a = dropout(g, apply(g, l.attn, f, f, false), p);
      return apply(g, l.norm, add(g, x, expand(g, a, 2, cols)));
    }
  }
  throw std::logic_error("unknown encoder kind");
}

Var Model::encode(Graph& g, const Tensor& tables) {
  Var x = cell_mlp(g, g.constant(tables));
  for (std::size_t i = 0; i < cfg_.n_enc; ++i) x = encoder_layer(g, i, x);
  return max_over(g, apply(g, last_, x), 1);
}

Var Model::decode(Graph& g, Var memory, std::span<const int> tokens, std::size_t batch, std::size_t len) {
  const std::size_t d = cfg_.d_model;
  if (len == 0 || len > cfg_.max_len) throw ShapeError("decoder length outside [1, max_len]");
  const Shape& ms = g.value(memory).shape();
  if (ms.size() != 3 || ms[0] != batch || ms[2] != d) {
    throw ShapeError("memory must be [B, c, d], got " + shape_string(ms));
  }
  const real p = static_cast<real>(cfg_.p_drop);
  Tensor pos({batch, len, d});
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy_n(positional_.data().data(), len * d, pos.data().data() + b * len * d);
  }
  Var x = embedding(g, g.parameter(*embed_), tokens, batch, len);
  x = dropout(g, add(g, x, g.constant(std::move(pos))), p);
  for (const DecoderLayer& l : dec_layers_) {
    x = apply(g, l.n1, add(g, x, dropout(g, apply(g, l.self_attn, x, x, true), p)));
    x = apply(g, l.n2, add(g, x, dropout(g, apply(g, l.cross_attn, x, memory, false), p)));
    const Var ff = apply(g, l.ff2, relu(g, apply(g, l.ff1, x)));
    x = apply(g, l.n3, add(g, x, dropout(g, ff, p)));
  }
  return reshape(g, apply(g, out_, x), {batch * len, cfg_.vocab});
}

std::vector<DecodeOutcome> Model::greedy_decode_batch(const Tensor& tables) {
  if (cfg_.vocab != kVocabSize) throw ConfigError("greedy decoding needs the full token vocabulary");
  if (tables.rank() != 3) throw ShapeError("tables must be [B, n, c]");
  const std::size_t batch = tables.dim(0);
  Tensor memory;
  {
    Graph g(false, false);
    memory = g.value(encode(g, tables));
  }
  std::vector<DecodeOutcome> out(batch);
  std::vector<bool> done(batch, false);
  std::size_t remaining = batch;
  for (std::size_t len = 1; len < cfg_.max_len && remaining > 0; ++len) {
    std::vector<int> ids(batch * len, token_id(Token::kPad));
    for (std::size_t b = 0; b < batch; ++b) {
      ids[b * len] = token_id(Token::kSos);
      for (std::size_t i = 0; i < out[b].tokens.size() && i + 1 < len; ++i) {
        ids[b * len + i + 1] = token_id(out[b].tokens[i]);
      }
    }
    Graph g(false, false);
    const Tensor& logits = g.value(decode(g, g.constant(memory), ids, batch, len));
    for (std::size_t b = 0; b < batch; ++b) {
      if (done[b]) continue;
      const real* row = logits.data().data() + (b * len + len - 1) * cfg_.vocab;
      const auto best = std::max_element(row, row + kNumGenerative) - row;
      out[b].tokens.push_back(token_from_id(static_cast<int>(best)));
      if (prefix_status(out[b].tokens) == PrefixStatus::kComplete) {
        out[b].complete = true;
        done[b] = true;
        --remaining;
      }
    }
  }
  return out;
}

TokenSequence Model::greedy_decode(const Tensor& table) {
  if (table.rank() != 2) throw ShapeError("table must be [n, c]");
  DecodeOutcome r = greedy_decode_batch(table.reshaped({1, table.dim(0), table.dim(1)})).front();
  if (!r.complete) throw IncompleteDecode(std::move(r.tokens));
  return std::move(r.tokens);
}

ParamCount count_params(const ModelConfig& cfg) {
  ParamCount c;
  c.closed_form = closed_form_param_count(cfg);
  c.allocated = Model(cfg, 0).params().total_count();
  if (c.closed_form != c.allocated) {
    throw std::logic_error("parameter count mismatch: closed form " + std::to_string(c.closed_form) +
                           ", allocated " + std::to_string(c.allocated));
  }
  return c;
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
