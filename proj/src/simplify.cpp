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

#include "srforge/simplify.hpp"

#include <algorithm>
#include <stdexcept>

namespace srforge {
namespace {

bool has_variable(const ExprNode& n) {
  if (is_variable(n.token)) return true;
  return std::any_of(n.children.begin(), n.children.end(), has_variable);
}

ExprNode make(Token t, ExprNode child) { return ExprNode{t, {std::move(child)}}; }

ExprNode make(Token t, ExprNode a, ExprNode b) { return ExprNode{t, {std::move(a), std::move(b)}}; }

// Children of `n` are already normalized.
ExprNode normalize(ExprNode n) {
  if (n.children.empty()) return n;
  if (!has_variable(n)) return ExprNode{Token::kConst, {}};

  switch (n.token) {
    case Token::kNeg:
    case Token::kInv:
      if (n.children[0].token == n.token) return std::move(n.children[0].children[0]);
      return n;
    case Token::kLog:
      if (n.children[0].token == Token::kExp) return std::move(n.children[0].children[0]);
      return n;
    case Token::kExp:
      if (n.children[0].token == Token::kLog) return std::move(n.children[0].children[0]);
      return n;
    case Token::kSq:
      if (n.children[0].token == Token::kSqrt) return std::move(n.children[0].children[0]);
      return n;
    case Token::kMul: {
      const bool neg_a = n.children[0].token == Token::kNeg;
      const bool neg_b = n.children[1].token == Token::kNeg;
      if (neg_a || neg_b) {
        auto strip = [](ExprNode& c, bool neg) { return neg ? std::move(c.children[0]) : std::move(c); };
        ExprNode lhs = strip(n.children[0], neg_a);
        ExprNode rhs = strip(n.children[1], neg_b);
        const bool both = neg_a && neg_b;
        ExprNode inner = normalize(make(Token::kMul, std::move(lhs), std::move(rhs)));
        return both ? inner : normalize(make(Token::kNeg, std::move(inner)));
      }
      [[fallthrough]];
    }
    case Token::kAdd:
      if (canonical_less(n.children[1], n.children[0])) std::swap(n.children[0], n.children[1]);
      return n;
    default:
      return n;
  }
}

ExprNode normalize_tree(const ExprNode& n) {
  ExprNode out{n.token, {}};
  out.children.reserve(n.children.size());
  for (const auto& c : n.children) out.children.push_back(normalize_tree(c));
  return normalize(std::move(out));
}

}  // namespace

const std::vector<RewriteRule>& rewrite_rules() {
  static const std::vector<RewriteRule> rules = {
      {"constant-folding", "subtree whose leaves are all C -> C"},
      {"involution", "neg(neg(u)) -> u, inv(inv(u)) -> u"},
      {"inverse-pair", "log(exp(u)) -> u, exp(log(u)) -> u, sq(sqrt(u)) -> u"},
      {"canonical-order", "children of add/mul sorted by (size, token ids)"},
      {"neg-hoisting", "mul(neg(a), b) -> neg(mul(a, b))"},
  };
  return rules;
}

bool canonical_less(const ExprNode& a, const ExprNode& b) {
  const std::size_t na = node_count(a);
  const std::size_t nb = node_count(b);
  if (na != nb) return na < nb;
  TokenSequence sa, sb;
  preorder_serialize(a, sa);
  preorder_serialize(b, sb);
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

ExprTree simplify(const ExprTree& tree) {
  ExprNode current = tree.root();
  // One bottom-up pass reaches the fixpoint; the loop guards that claim.
  for (int pass = 0; pass < 64; ++pass) {
    ExprNode next = normalize_tree(current);
    if (next == current) return ExprTree(std::move(next));
    current = std::move(next);
  }
  throw std::logic_error("simplify did not reach a fixpoint");
}

std::string canonical_key(const ExprTree& tree) { return to_text(preorder_serialize(tree)); }

std::string_view verdict_name(SkeletonVerdict v) {
  switch (v) {
    case SkeletonVerdict::kValid: return "valid";
    case SkeletonVerdict::kSingleLeaf: return "single-leaf";
    case SkeletonVerdict::kNoConstant: return "no-constant";
    case SkeletonVerdict::kNoVariable: return "no-variable";
    case SkeletonVerdict::kTooLong: return "too-long";
  }
  return "unknown";
}

SkeletonVerdict validate_skeleton(const ExprTree& tree, std::size_t max_tokens) {
  const std::size_t n = tree.node_count();
  if (n == 1) return SkeletonVerdict::kSingleLeaf;
  if (tree.count(Token::kConst) == 0) return SkeletonVerdict::kNoConstant;
  if (tree.variable_mask() == 0) return SkeletonVerdict::kNoVariable;
  if (n > max_tokens) return SkeletonVerdict::kTooLong;
  return SkeletonVerdict::kValid;
}

}  // namespace srforge
