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

#include "srforge/graph.hpp"
#include "srforge/ops.hpp"
#include "srforge/token.hpp"

namespace srforge::acceptance {

double uniform_logits_cross_entropy(double label_smoothing) {
  Graph g(false, false);
  const std::vector<int> targets{0, 5, 11, 19};
  const std::vector<std::uint8_t> keep(targets.size(), 1);
  const Var logits = g.constant(Tensor({targets.size(), static_cast<std::size_t>(kVocabSize)}));
  return g.value(cross_entropy(g, logits, targets, keep, label_smoothing))[0];
}

}  // namespace srforge::acceptance
