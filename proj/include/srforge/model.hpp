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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "srforge/graph.hpp"
#include "srforge/model_config.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {

struct LinearParams {
  Parameter* w = nullptr;
  Parameter* b = nullptr;
};

struct NormParams {
  Parameter* gain = nullptr;
  Parameter* bias = nullptr;
};

struct AttentionParams {
  LinearParams q, k, v, o;
};

/// Encoder-decoder over tables [B, n_rows, d_cols]. Parameters are
/// registered in a fixed order and initialized from `init_seed`.
class Model {
 public:
  Model(ModelConfig cfg, std::uint64_t init_seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return cfg_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  /// Cell MLP on tables [B, n, c] -> [B, n, c, d].
  Var cell_mlp(Graph& g, Var tables);
  /// One encoder layer of the configured kind, [B, n, c, d] -> same shape.
  Var encoder_layer(Graph& g, std::size_t layer, Var x);
  /// Tables [B, n, c] -> memory [B, c, d].
  Var encode(Graph& g, const Tensor& tables);
  /// Decoder over token ids [B, L] (L <= max_len) -> logits [B * L, vocab].
  Var decode(Graph& g, Var memory, std::span<const int> tokens, std::size_t batch, std::size_t len);

  /// Greedy decoding of every table in the batch. Stops each sequence when
  /// it forms a complete expression or after max_len - 1 tokens.
  std::vector<DecodeOutcome> greedy_decode_batch(const Tensor& tables);
  /// Single table [n, c]; throws IncompleteDecode when the limit is hit.
  TokenSequence greedy_decode(const Tensor& table);

 private:
  LinearParams add_linear(const std::string& name, std::size_t in, std::size_t out, bool bias = true);
  NormParams add_norm(const std::string& name);
  AttentionParams add_attention(const std::string& name);
  void initialize(std::uint64_t seed);

  Var apply(Graph& g, const LinearParams& p, Var x);
  Var apply(Graph& g, const NormParams& p, Var x);
  /// Projections plus attention core; q_in [S, Lq, d], kv_in [S, Lk, d].
  Var apply(Graph& g, const AttentionParams& p, Var q_in, Var kv_in, bool causal);

  struct MlpLayer {
    LinearParams a1, a2, b1, b2;
  };
  struct AttLayer {
    AttentionParams attn;
    NormParams norm;
  };
  struct MixLayer {
    LinearParams f1, f2;
    AttentionParams attn;
    NormParams norm;
  };
  struct DecoderLayer {
    AttentionParams self_attn, cross_attn;
    LinearParams ff1, ff2;
    NormParams n1, n2, n3;
  };

  ModelConfig cfg_;
  ParameterStore params_;
  Parameter* embed_ = nullptr;
  LinearParams cell1_, cell2_, last_, out_;
  std::vector<MlpLayer> mlp_layers_;
  std::vector<AttLayer> att_layers_;
  std::vector<MixLayer> mix_layers_;
  std::vector<DecoderLayer> dec_layers_;
  Tensor positional_;
};

/// Closed-form and allocated totals; throws std::logic_error if they differ.
struct ParamCount {
  std::size_t closed_form = 0;
  std::size_t allocated = 0;
};
ParamCount count_params(const ModelConfig& cfg);

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
