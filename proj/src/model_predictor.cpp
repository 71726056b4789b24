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

#include "srforge/model_predictor.hpp"

#include <algorithm>

namespace srforge {
inline namespace SRFORGE_PRECISION {

DecodeOutcome ModelPredictor::predict(const PredictRequest& request) {
  return predict_batch(std::span<const PredictRequest>(&request, 1)).front();
}

std::vector<DecodeOutcome> ModelPredictor::predict_batch(std::span<const PredictRequest> requests) {
  if (requests.empty()) return {};
  const std::size_t cols = model_.config().d_cols;
  const std::size_t rows = requests.front().rows;
  for (const auto& r : requests) {
    if (r.rows != rows || r.table.size() != rows * cols) {
      throw std::invalid_argument("batched prediction needs equally shaped tables");
    }
  }
  Tensor tables({requests.size(), rows, cols});
  for (std::size_t i = 0; i < requests.size(); ++i) {
    std::transform(requests[i].table.begin(), requests[i].table.end(),
                   tables.data().begin() + static_cast<std::ptrdiff_t>(i * rows * cols),
                   [](float v) { return static_cast<real>(v); });
  }
  return model_.greedy_decode_batch(tables);
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
