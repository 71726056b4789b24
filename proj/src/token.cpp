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

#include "srforge/token.hpp"

#include <sstream>

namespace srforge {
namespace {

constexpr std::array<std::string_view, kVocabSize> kNames = {
    "add", "mul", "sin", "cos", "log", "exp", "neg", "inv", "sq",    "cb",
    "sqrt", "C",  "x1",  "x2",  "x3",  "x4",  "x5",  "x6",  "<SOS>", "<PAD>"};

constexpr std::array<double, kNumGenerative> kDefaultWeights = {
    2.0,   // add
    2.0,   // mul
    0.5,   // sin
    0.5,   // cos
    0.5,   // log
    0.5,   // exp
    1.0,   // neg
    1.0,   // inv
    1.0,   // sq
    0.25,  // cb
    0.5,   // sqrt
    4.0,   // C
    1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

}  // namespace

Token token_from_id(int id) {
  if (id < 0 || id >= kVocabSize) {
    throw InvalidTokenError("token id out of range: " + std::to_string(id));
  }
  return static_cast<Token>(id);
}

std::string_view token_name(Token t) { return kNames[token_id(t)]; }

std::optional<Token> token_from_name(std::string_view name) {
  for (int i = 0; i < kVocabSize; ++i) {
    if (kNames[i] == name) return static_cast<Token>(i);
  }
  if (name == "SOS") return Token::kSos;
  if (name == "PAD") return Token::kPad;
  return std::nullopt;
}

int token_arity(Token t) {
  switch (t) {
    case Token::kAdd:
    case Token::kMul:
      return 2;
    case Token::kSin:
    case Token::kCos:
    case Token::kLog:
    case Token::kExp:
    case Token::kNeg:
    case Token::kInv:
    case Token::kSq:
    case Token::kCb:
    case Token::kSqrt:
      return 1;
    case Token::kSos:
    case Token::kPad:
      throw InvalidTokenError("special token has no arity: " + std::string(token_name(t)));
    default:
      return 0;
  }
}

Vocabulary::Vocabulary() : Vocabulary(kDefaultWeights) {}

Vocabulary::Vocabulary(std::array<double, kNumGenerative> weights) : weights_(weights) {
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("sampling weights must be non-negative");
  }
}

const std::array<Token, kVocabSize>& Vocabulary::tokens() {
  static const std::array<Token, kVocabSize> all = [] {
    std::array<Token, kVocabSize> out{};
    for (int i = 0; i < kVocabSize; ++i) out[i] = static_cast<Token>(i);
    return out;
  }();
  return all;
}

double Vocabulary::weight(Token t) const {
  if (is_special(t)) throw InvalidTokenError("special tokens have no sampling weight");
  return weights_[token_id(t)];
}

void Vocabulary::set_weight(Token t, double w) {
  if (is_special(t)) throw InvalidTokenError("special tokens have no sampling weight");
  if (!(w >= 0.0)) throw std::invalid_argument("sampling weights must be non-negative");
  weights_[token_id(t)] = w;
}

std::string to_text(const TokenSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += token_name(seq[i]);
  }
  return out;
}

TokenSequence sequence_from_text(std::string_view text) {
  TokenSequence seq;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    auto t = token_from_name(word);
    if (!t) throw InvalidTokenError("unknown token: " + word);
    seq.push_back(*t);
  }
  return seq;
}

}  // namespace srforge
