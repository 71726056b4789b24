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

#include "srforge/model_config.hpp"

#include <algorithm>
#include <cctype>

namespace srforge {

std::string_view encoder_kind_name(EncoderKind k) {
  switch (k) {
    case EncoderKind::kMlp: return "mlp";
    case EncoderKind::kAtt: return "att";
    case EncoderKind::kMix: return "mix";
  }
  return "?";
}

std::optional<EncoderKind> encoder_kind_from_name(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "mlp") return EncoderKind::kMlp;
  if (s == "att") return EncoderKind::kAtt;
  if (s == "mix") return EncoderKind::kMix;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (d_model == 0 || d_model % 2 != 0) throw ConfigError("d_model must be a positive even number");
  if (heads == 0 || d_model % heads != 0) throw ConfigError("heads must divide d_model");
  if (vocab == 0) throw ConfigError("vocab must be positive");
  if (max_len < 2) throw ConfigError("max_len must be at least 2");
  if (n_rows == 0) throw ConfigError("n_rows must be positive");
  if (d_cols != 7) throw ConfigError("d_cols must be 7");
  if (!(p_drop >= 0.0 && p_drop < 1.0)) throw ConfigError("p_drop must be in [0, 1)");
  if (encoder != EncoderKind::kMlp && encoder != EncoderKind::kAtt && encoder != EncoderKind::kMix) {
    throw ConfigError("unknown encoder kind");
  }
}

std::size_t closed_form_param_count(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.d_model;
  const std::size_t v = cfg.vocab;
  const std::size_t c = cfg.d_cols;
  std::size_t enc_layer = 0;
  switch (cfg.encoder) {
    case EncoderKind::kMlp: enc_layer = 3 * d * d / 2 + 2 * d; break;
    case EncoderKind::kAtt: enc_layer = 4 * d * d + 6 * d; break;
    case EncoderKind::kMix: enc_layer = (5 + c) * d * d + 8 * d; break;
  }
  return (d * d + 3 * d) + cfg.n_enc * enc_layer + (d * d + d) + v * d +
         cfg.n_dec * (12 * d * d + 17 * d) + (v * d + v);
}

IncompleteDecode::IncompleteDecode(TokenSequence partial)
    : std::runtime_error("decoding stopped at the length limit with an incomplete expression: " +
                         to_text(partial)),
      partial_(std::move(partial)) {}

}  // namespace srforge
