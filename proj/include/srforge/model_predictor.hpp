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

#include "srforge/evalbench.hpp"
#include "srforge/model.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {

/// Greedy decoding with a frozen model. Safe to share across threads as long
/// as nothing trains the model meanwhile.
class ModelPredictor : public Predictor {
 public:
  explicit ModelPredictor(Model& model) : model_(model) {}
  DecodeOutcome predict(const PredictRequest& request) override;
  /// Decodes all requests with equal row counts as one batch.
  std::vector<DecodeOutcome> predict_batch(std::span<const PredictRequest> requests) override;

 private:
  Model& model_;
};

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
