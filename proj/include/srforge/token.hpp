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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace srforge {

/// Token kinds. The numeric value is the token id used by the model.
enum class Token : std::uint8_t {
  kAdd = 0,
  kMul,
  kSin,
  kCos,
  kLog,
  kExp,
  kNeg,
  kInv,
  kSq,
  kCb,
  kSqrt,
  kConst,
  kX1,
  kX2,
  kX3,
  kX4,
  kX5,
  kX6,
  kSos,
  kPad,
};

inline constexpr int kVocabSize = 20;
inline constexpr int kNumGenerative = 18;
inline constexpr int kNumVariables = 6;

class InvalidTokenError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

constexpr int token_id(Token t) { return static_cast<int>(t); }

/// Throws InvalidTokenError when `id` is outside 0..19.
Token token_from_id(int id);

std::string_view token_name(Token t);
std::optional<Token> token_from_name(std::string_view name);

constexpr bool is_special(Token t) { return t == Token::kSos || t == Token::kPad; }
constexpr bool is_variable(Token t) { return t >= Token::kX1 && t <= Token::kX6; }
constexpr bool is_leaf(Token t) { return t >= Token::kConst && t <= Token::kX6; }

/// 0-based variable index (x1 -> 0). Precondition: is_variable(t).
constexpr int variable_index(Token t) { return token_id(t) - token_id(Token::kX1); }
constexpr Token variable_token(int index) { return static_cast<Token>(token_id(Token::kX1) + index); }

/// Number of children required by a generative token. SOS and PAD raise
/// InvalidTokenError.
int token_arity(Token t);

/// The fixed 20-token vocabulary and its generative sampling weights.
class Vocabulary {
 public:
  /// Default weights: add 2, mul 2, neg 1, inv 1, sq 1, sqrt .5, cb .25,
  /// sin .5, cos .5, log .5, exp .5, C 4, x1..x6 1.
  Vocabulary();
  explicit Vocabulary(std::array<double, kNumGenerative> weights);

  static constexpr int size() { return kVocabSize; }
  static const std::array<Token, kVocabSize>& tokens();

  /// Sampling weight of a generative token; SOS/PAD raise InvalidTokenError.
  double weight(Token t) const;
  const std::array<double, kNumGenerative>& weights() const { return weights_; }
  void set_weight(Token t, double w);

 private:
  std::array<double, kNumGenerative> weights_;
};

/// Pre-order token sequence.
using TokenSequence = std::vector<Token>;

/// Whitespace-separated token names, e.g. "add mul C x1".
std::string to_text(const TokenSequence& seq);

/// Parses the whitespace-separated form. Throws InvalidTokenError on an
/// unknown name.
TokenSequence sequence_from_text(std::string_view text);

}  // namespace srforge
