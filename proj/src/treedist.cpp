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

#include "srforge/treedist.hpp"

#include <algorithm>

namespace srforge {
namespace {

// Returns the post-order index of `n`.
int visit(const ExprNode& n, LabeledOrderedTree& t) {
  int leftmost = -1;
  for (const auto& c : n.children) {
    const int ci = visit(c, t);
    if (leftmost < 0) leftmost = t.leftmost_leaf[ci];
  }
  const int index = t.size();
  t.labels.push_back(n.token);
  t.leftmost_leaf.push_back(leftmost < 0 ? index : leftmost);
  return index;
}

}  // namespace

LabeledOrderedTree::LabeledOrderedTree(const ExprTree& tree) {
  visit(tree.root(), *this);
  // A keyroot is the highest node with a given leftmost leaf.
  const int n = size();
  std::vector<bool> seen(n, false);
  for (int i = n - 1; i >= 0; --i) {
    if (!seen[leftmost_leaf[i]]) {
      seen[leftmost_leaf[i]] = true;
      keyroots.push_back(i);
    }
  }
  std::sort(keyroots.begin(), keyroots.end());
}

int ted(const LabeledOrderedTree& a, const LabeledOrderedTree& b) {
  const int na = a.size();
  const int nb = b.size();
  std::vector<int> tree_dist(static_cast<std::size_t>(na) * nb, 0);
  std::vector<int> forest((na + 1) * static_cast<std::size_t>(nb + 1), 0);
  auto td = [&](int i, int j) -> int& { return tree_dist[static_cast<std::size_t>(i) * nb + j]; };

  for (int i : a.keyroots) {
    for (int j : b.keyroots) {
      const int li = a.leftmost_leaf[i];
      const int lj = b.leftmost_leaf[j];
      const int rows = i - li + 2;
      const int cols = j - lj + 2;
      auto fd = [&](int x, int y) -> int& { return forest[static_cast<std::size_t>(x) * cols + y]; };
      fd(0, 0) = 0;
      for (int x = 1; x < rows; ++x) fd(x, 0) = fd(x - 1, 0) + 1;
      for (int y = 1; y < cols; ++y) fd(0, y) = fd(0, y - 1) + 1;
      for (int x = 1; x < rows; ++x) {
        const int ai = li + x - 1;
        for (int y = 1; y < cols; ++y) {
          const int bj = lj + y - 1;
          const int del = fd(x - 1, y) + 1;
          const int ins = fd(x, y - 1) + 1;
          if (a.leftmost_leaf[ai] == li && b.leftmost_leaf[bj] == lj) {
            const int rel = fd(x - 1, y - 1) + (a.labels[ai] == b.labels[bj] ? 0 : 1);
            fd(x, y) = std::min({del, ins, rel});
            td(ai, bj) = fd(x, y);
          } else {
            const int px = a.leftmost_leaf[ai] - li;
            const int py = b.leftmost_leaf[bj] - lj;
            fd(x, y) = std::min({del, ins, fd(px, py) + td(ai, bj)});
          }
        }
      }
    }
  }
  return td(na - 1, nb - 1);
}

int ted(const ExprTree& a, const ExprTree& b) {
  return ted(LabeledOrderedTree(a), LabeledOrderedTree(b));
}

double normalized_ted(const ExprTree& pred, const ExprTree& truth) {
  const double d = ted(pred, truth);
  return std::min(1.0, d / static_cast<double>(truth.node_count()));
}

}  // namespace srforge
