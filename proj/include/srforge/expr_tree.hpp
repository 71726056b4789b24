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
#include <span>
#include <stdexcept>
#include <vector>

#include "srforge/token.hpp"

namespace srforge {

/// A node of an expression tree. Children are stored in order; a node's child
/// count always equals the arity of its token.
struct ExprNode {
  Token token = Token::kConst;
  std::vector<ExprNode> children;

  friend bool operator==(const ExprNode&, const ExprNode&) = default;
};

class ExprTree {
 public:
  /// Validates arities recursively; throws std::invalid_argument otherwise.
  explicit ExprTree(ExprNode root);

  static ExprTree leaf(Token t);
  static ExprTree unary(Token op, ExprTree child);
  static ExprTree binary(Token op, ExprTree lhs, ExprTree rhs);

  const ExprNode& root() const { return root_; }
  std::size_t node_count() const;
  int count(Token t) const;
  /// Bitmask of variables present (bit i for x_{i+1}).
  unsigned variable_mask() const;

  friend bool operator==(const ExprTree&, const ExprTree&) = default;

 private:
  ExprNode root_;
};

std::size_t node_count(const ExprNode& n);

class SequenceParseError : public std::runtime_error {
 public:
  enum class Kind { kArityDeficit, kSurplusTokens, kInvalidToken };
  SequenceParseError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

TokenSequence preorder_serialize(const ExprTree& tree);
void preorder_serialize(const ExprNode& node, TokenSequence& out);

/// Inverse of preorder_serialize. Throws SequenceParseError.
ExprTree preorder_parse(std::span<const Token> seq);

enum class PrefixStatus { kComplete, kNeedsMore, kInvalid };

/// Classifies a (possibly partial) pre-order sequence by its open-slot count.
PrefixStatus prefix_status(std::span<const Token> seq);

class EvalError : public std::domain_error {
 public:
  enum class Kind { kDomain, kNonFinite, kMissingValue };
  EvalError(Kind kind, const std::string& what) : std::domain_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using VariableValues = std::array<double, kNumVariables>;

/// Outcome of a non-throwing evaluation.
struct EvalResult {
  double value = 0.0;
  bool ok = false;
  EvalError::Kind error = EvalError::Kind::kDomain;
};

/// `consts` holds one value per C leaf, in pre-order position.
EvalResult try_evaluate(const ExprTree& tree, const VariableValues& vars,
                        std::span<const double> consts);

/// Throwing form of try_evaluate.
double evaluate(const ExprTree& tree, const VariableValues& vars, std::span<const double> consts);

}  // namespace srforge
