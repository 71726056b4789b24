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

#include <string>
#include <string_view>
#include <vector>

#include "srforge/expr_tree.hpp"

namespace srforge {

/// A rewrite rule of the canonical simplifier. Every rule either removes nodes
/// or moves a `neg` strictly upwards, so rewriting terminates.
struct RewriteRule {
  std::string_view name;
  std::string_view description;
};

/// The fixed rule set, in application order.
const std::vector<RewriteRule>& rewrite_rules();

/// Rewrites to the fixpoint of:
///  1. constant folding: a subtree (size > 1) whose leaves are all C becomes C
///  2. involutions: neg(neg(u)) -> u, inv(inv(u)) -> u
///  3. inverse pairs: log(exp(u)) -> u, exp(log(u)) -> u, sq(sqrt(u)) -> u
///  4. children of add/mul sorted by canonical_less
///  5. neg hoisting out of mul: mul(neg(a), b) -> neg(mul(a, b)) (either side)
///
/// sqrt(sq(u)) is deliberately left alone; it equals |u|, not u.
ExprTree simplify(const ExprTree& tree);

/// Canonical child order: node count first, then the pre-order token-id
/// sequence lexicographically.
bool canonical_less(const ExprNode& a, const ExprNode& b);

/// Deduplication key: the pre-order token text of an already simplified tree.
std::string canonical_key(const ExprTree& tree);

enum class SkeletonVerdict { kValid, kSingleLeaf, kNoConstant, kNoVariable, kTooLong };

inline constexpr std::size_t kMaxSkeletonTokens = 30;

std::string_view verdict_name(SkeletonVerdict v);

/// The four skeleton filters; the first failing one is reported.
SkeletonVerdict validate_skeleton(const ExprTree& tree, std::size_t max_tokens = kMaxSkeletonTokens);

}  // namespace srforge
