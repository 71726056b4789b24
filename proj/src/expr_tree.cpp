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

#include "srforge/expr_tree.hpp"

#include <cmath>
#include <string>

namespace srforge {
namespace {

void check_node(const ExprNode& n) {
  if (is_special(n.token)) {
    throw std::invalid_argument("SOS/PAD cannot appear inside an expression tree");
  }
  if (static_cast<int>(n.children.size()) != token_arity(n.token)) {
    throw std::invalid_argument("child count does not match arity of " +
                                std::string(token_name(n.token)));
  }
  for (const auto& c : n.children) check_node(c);
}

int count_token(const ExprNode& n, Token t) {
  int c = n.token == t ? 1 : 0;
  for (const auto& ch : n.children) c += count_token(ch, t);
  return c;
}

unsigned mask_of(const ExprNode& n) {
  unsigned m = is_variable(n.token) ? (1u << variable_index(n.token)) : 0u;
  for (const auto& ch : n.children) m |= mask_of(ch);
  return m;
}

ExprNode parse_node(std::span<const Token> seq, std::size_t& pos) {
  if (pos >= seq.size()) {
    throw SequenceParseError(SequenceParseError::Kind::kArityDeficit,
                             "sequence ends before the tree is complete");
  }
  const Token t = seq[pos++];
  if (is_special(t)) {
    throw SequenceParseError(SequenceParseError::Kind::kInvalidToken,
                             "special token inside expression sequence");
  }
  ExprNode node{t, {}};
  const int arity = token_arity(t);
  node.children.reserve(arity);
  for (int i = 0; i < arity; ++i) node.children.push_back(parse_node(seq, pos));
  return node;
}

struct Evaluator {
  const VariableValues& vars;
  std::span<const double> consts;
  std::size_t next_const = 0;
  EvalResult failure{};

  bool fail(EvalError::Kind k) {
    failure.ok = false;
    failure.error = k;
    return false;
  }

  bool run(const ExprNode& n, double& out) {
    if (n.token == Token::kConst) {
      if (next_const >= consts.size()) return fail(EvalError::Kind::kMissingValue);
      out = consts[next_const++];
      return std::isfinite(out) || fail(EvalError::Kind::kNonFinite);
    }
    if (is_variable(n.token)) {
      out = vars[variable_index(n.token)];
      return std::isfinite(out) || fail(EvalError::Kind::kNonFinite);
    }
    double a = 0.0;
    if (!run(n.children[0], a)) return false;
    switch (n.token) {
      case Token::kAdd:
      case Token::kMul: {
        double b = 0.0;
        if (!run(n.children[1], b)) return false;
        out = n.token == Token::kAdd ? a + b : a * b;
        break;
      }
      case Token::kSin: out = std::sin(a); break;
      case Token::kCos: out = std::cos(a); break;
      case Token::kLog:
        if (!(a > 0.0)) return fail(EvalError::Kind::kDomain);
        out = std::log(a);
        break;
      case Token::kExp: out = std::exp(a); break;
      case Token::kNeg: out = -a; break;
      case Token::kInv:
        if (a == 0.0) return fail(EvalError::Kind::kDomain);
        out = 1.0 / a;
        break;
      case Token::kSq: out = a * a; break;
      case Token::kCb: out = a * a * a; break;
      case Token::kSqrt:
        if (a < 0.0) return fail(EvalError::Kind::kDomain);
        out = std::sqrt(a);
        break;
      default:
        return fail(EvalError::Kind::kDomain);
    }
    return std::isfinite(out) || fail(EvalError::Kind::kNonFinite);
  }
};

}  // namespace

ExprTree::ExprTree(ExprNode root) : root_(std::move(root)) { check_node(root_); }

ExprTree ExprTree::leaf(Token t) { return ExprTree(ExprNode{t, {}}); }

ExprTree ExprTree::unary(Token op, ExprTree child) {
  return ExprTree(ExprNode{op, {std::move(child.root_)}});
}

ExprTree ExprTree::binary(Token op, ExprTree lhs, ExprTree rhs) {
  return ExprTree(ExprNode{op, {std::move(lhs.root_), std::move(rhs.root_)}});
}

std::size_t node_count(const ExprNode& n) {
  std::size_t c = 1;
  for (const auto& ch : n.children) c += node_count(ch);
  return c;
}

std::size_t ExprTree::node_count() const { return srforge::node_count(root_); }
int ExprTree::count(Token t) const { return count_token(root_, t); }
unsigned ExprTree::variable_mask() const { return mask_of(root_); }

void preorder_serialize(const ExprNode& node, TokenSequence& out) {
  out.push_back(node.token);
  for (const auto& c : node.children) preorder_serialize(c, out);
}

TokenSequence preorder_serialize(const ExprTree& tree) {
  TokenSequence out;
  preorder_serialize(tree.root(), out);
  return out;
}

ExprTree preorder_parse(std::span<const Token> seq) {
  std::size_t pos = 0;
  ExprNode root = parse_node(seq, pos);
  if (pos != seq.size()) {
    throw SequenceParseError(SequenceParseError::Kind::kSurplusTokens,
                             "surplus tokens after the tree is complete (position " +
                                 std::to_string(pos) + ")");
  }
  return ExprTree(std::move(root));
}

PrefixStatus prefix_status(std::span<const Token> seq) {
  long open = 1;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (open <= 0 || is_special(seq[i])) return PrefixStatus::kInvalid;
    open += token_arity(seq[i]) - 1;
  }
  if (open == 0) return PrefixStatus::kComplete;
  return open > 0 ? PrefixStatus::kNeedsMore : PrefixStatus::kInvalid;
}

EvalResult try_evaluate(const ExprTree& tree, const VariableValues& vars,
                        std::span<const double> consts) {
  Evaluator ev{vars, consts};
  EvalResult r;
  if (ev.run(tree.root(), r.value)) {
    r.ok = true;
    return r;
  }
  return ev.failure;
}

double evaluate(const ExprTree& tree, const VariableValues& vars, std::span<const double> consts) {
  const EvalResult r = try_evaluate(tree, vars, consts);
  if (!r.ok) {
    switch (r.error) {
      case EvalError::Kind::kDomain:
        throw EvalError(r.error, "domain error during evaluation");
      case EvalError::Kind::kNonFinite:
        throw EvalError(r.error, "non-finite value during evaluation");
      case EvalError::Kind::kMissingValue:
        throw EvalError(r.error, "not enough constant values supplied");
    }
  }
  return r.value;
}

}  // namespace srforge
