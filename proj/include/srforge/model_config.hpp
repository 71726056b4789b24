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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "srforge/token.hpp"

namespace srforge {

enum class EncoderKind : std::uint8_t { kMlp = 0, kAtt = 1, kMix = 2 };

std::string_view encoder_kind_name(EncoderKind k);
/// Accepts "mlp", "att", "mix" (case-insensitive).
std::optional<EncoderKind> encoder_kind_from_name(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
  std::size_t d_model = 256;
  std::size_t n_enc = 4;
  std::size_t n_dec = 8;
  std::size_t heads = 4;
  std::size_t vocab = kVocabSize;
  std::size_t max_len = 31;
  std::size_t n_rows = 50;
  std::size_t d_cols = 7;
  double p_drop = 0.25;
  EncoderKind encoder = EncoderKind::kMlp;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Parameter count from the per-block formulas:
///   cell MLP d^2+3d; encoder layer 1.5d^2+2d (MLP), 4d^2+6d (Att),
///   (5+c)d^2+8d (Mix); last MLP d^2+d; embeddings vd;
///   decoder layer 12d^2+17d; output vd+v.
std::size_t closed_form_param_count(const ModelConfig& cfg);

/// Greedy decoding reached the length limit before the expression closed.
class IncompleteDecode : public std::runtime_error {
 public:
  explicit IncompleteDecode(TokenSequence partial);
  const TokenSequence& partial() const { return partial_; }

 private:
  TokenSequence partial_;
};

/// Result of one greedy decode; `complete` is false when the length limit
/// was hit first.
struct DecodeOutcome {
  TokenSequence tokens;
  bool complete = false;
};

}  // namespace srforge
