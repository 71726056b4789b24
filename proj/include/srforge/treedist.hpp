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

#include <vector>

#include "srforge/expr_tree.hpp"

namespace srforge {

/// Post-order view of an ExprTree used by the Zhang-Shasha recursion.
struct LabeledOrderedTree {
  std::vector<Token> labels;        // post-order
  std::vector<int> leftmost_leaf;   // l(i): post-order index of leftmost leaf descendant
  std::vector<int> keyroots;        // ascending

  explicit LabeledOrderedTree(const ExprTree& tree);
  int size() const { return static_cast<int>(labels.size()); }
};

/// Unit-cost ordered tree edit distance (insert, delete, relabel).
int ted(const ExprTree& a, const ExprTree& b);
int ted(const LabeledOrderedTree& a, const LabeledOrderedTree& b);

/// min(1, ted(pred, truth) / |truth|).
double normalized_ted(const ExprTree& pred, const ExprTree& truth);

}  // namespace srforge
