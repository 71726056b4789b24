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

#include <cmath>

#include "doctest.h"
#include "srforge/simplify.hpp"
#include "test_support.hpp"

namespace srforge {
namespace {

using testing::tree;

bool has_foldable_subtree(const ExprNode& n) {
  if (n.children.empty()) return false;
  bool any_var = false;
  std::vector<const ExprNode*> stack{&n};
  while (!stack.empty()) {
    const ExprNode* cur = stack.back();
    stack.pop_back();
    if (is_variable(cur->token)) any_var = true;
    for (const auto& c : cur->children) stack.push_back(&c);
  }
  if (!any_var) return true;
  for (const auto& c : n.children) {
    if (has_foldable_subtree(c)) return true;
  }
  return false;
}

TEST_CASE("rewrite examples") {
  CHECK(simplify(tree("neg neg x1")) == tree("x1"));
  CHECK(simplify(tree("inv inv x2")) == tree("x2"));
  CHECK(simplify(tree("mul C add C C")) == tree("C"));
  CHECK(simplify(tree("add x2 x1")) == tree("add x1 x2"));
  CHECK(simplify(tree("log exp x1")) == tree("x1"));
  CHECK(simplify(tree("exp log x1")) == tree("x1"));
  CHECK(simplify(tree("sq sqrt x1")) == tree("x1"));
  CHECK(simplify(tree("sqrt sq x1")) == tree("sqrt sq x1"));
  CHECK(simplify(tree("mul neg x1 x2")) == tree("neg mul x1 x2"));
  CHECK(simplify(tree("mul x2 neg x1")) == tree("neg mul x1 x2"));
  CHECK(simplify(tree("mul neg x1 neg x2")) == tree("mul x1 x2"));
  CHECK(simplify(tree("add sin C x1")) == tree("add C x1"));
  CHECK(simplify(tree("neg mul neg x1 x2")) == tree("mul x1 x2"));
}

TEST_CASE("canonical keys") {
  CHECK(canonical_key(simplify(tree("add x1 x2"))) == canonical_key(simplify(tree("add x2 x1"))));
  CHECK(canonical_key(tree("x1")) != canonical_key(tree("x2")));
  CHECK(canonical_key(tree("add mul C x1 mul x2 log x1")) == "add mul C x1 mul x2 log x1");
}

TEST_CASE("skeleton filters") {
  CHECK(validate_skeleton(tree("x1")) == SkeletonVerdict::kSingleLeaf);
  CHECK(validate_skeleton(tree("add x1 x2")) == SkeletonVerdict::kNoConstant);
  CHECK(validate_skeleton(tree("mul C x1")) == SkeletonVerdict::kValid);
  CHECK(validate_skeleton(tree("sin C")) == SkeletonVerdict::kNoVariable);
  TokenSequence long_seq;
  for (int i = 0; i < 15; ++i) long_seq.push_back(Token::kNeg);
  for (int i = 0; i < 14; ++i) long_seq.push_back(Token::kSin);
  long_seq.push_back(Token::kX1);
  CHECK(validate_skeleton(preorder_parse(long_seq)) == SkeletonVerdict::kNoConstant);
  long_seq.back() = Token::kX1;
  long_seq.insert(long_seq.begin(), {Token::kMul, Token::kConst});
  CHECK(long_seq.size() == 32);
  CHECK(validate_skeleton(preorder_parse(long_seq)) == SkeletonVerdict::kTooLong);
  CHECK(verdict_name(SkeletonVerdict::kTooLong) == "too-long");
}

TEST_CASE("simplify is idempotent and shrinks on 10000 random trees") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const ExprTree t = testing::random_tree(rng, 30);
    const ExprTree s = simplify(t);
    REQUIRE(simplify(s) == s);
    REQUIRE(s.node_count() <= t.node_count());
  }
}

TEST_CASE("simplify preserves values") {
  Rng rng(31);
  std::uniform_real_distribution<double> log_var(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> cval(0.5, 2.0);
  int compared = 0;
  int attempts = 0;
  while (compared < 1000 && attempts < 200000) {
    ++attempts;
    const ExprTree t = testing::random_tree(rng, 15);
    const ExprTree s = simplify(t);
    VariableValues vars{};
    for (double& v : vars) v = std::exp(log_var(rng));
    const double c = cval(rng);
    const std::vector<double> ct(static_cast<std::size_t>(t.count(Token::kConst)), c);
    const std::vector<double> cs(static_cast<std::size_t>(s.count(Token::kConst)), c);
    const EvalResult a = try_evaluate(t, vars, ct);
    const EvalResult b = try_evaluate(s, vars, cs);
    // A folded C stands for a different value than the tied one.
    if (has_foldable_subtree(t.root())) continue;
    INFO(to_text(preorder_serialize(t)), " -> ", to_text(preorder_serialize(s)));
    if (a.ok) REQUIRE(b.ok);
    if (!a.ok || !b.ok) continue;
    REQUIRE(std::abs(a.value - b.value) <= 1e-9 * std::max(1.0, std::abs(a.value)));
    ++compared;
  }
  CHECK(compared == 1000);
}

TEST_CASE("rule list is documented") {
  CHECK(rewrite_rules().size() == 5);
  for (const auto& r : rewrite_rules()) {
    CHECK_FALSE(r.name.empty());
    CHECK_FALSE(r.description.empty());
  }
}

}  // namespace
}  // namespace srforge
