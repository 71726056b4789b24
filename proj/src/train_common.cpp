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

#include <algorithm>
#include <sstream>

#include "srforge/train.hpp"

namespace srforge {
namespace {

template <class T>
double accuracy_impl(std::span<const T> logits, std::size_t vocab, std::span<const int> targets,
                     std::span<const std::uint8_t> keep) {
  if (vocab == 0 || logits.size() != targets.size() * vocab || keep.size() != targets.size()) {
    throw std::invalid_argument("token_accuracy: shape mismatch");
  }
  std::size_t kept = 0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    if (!keep[r]) continue;
    ++kept;
    const T* row = logits.data() + r * vocab;
    if (std::max_element(row, row + vocab) - row == targets[r]) ++hits;
  }
  if (kept == 0) throw std::invalid_argument("token_accuracy: every position is masked");
  return static_cast<double>(hits) / static_cast<double>(kept);
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (eval_batch == 0) throw ConfigError("eval_batch must be at least 1");
  if (warmup_steps == 0) throw ConfigError("warmup_steps must be at least 1");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) throw ConfigError("label_smoothing must be in [0, 1)");
  if (!(lr_scale > 0.0)) throw ConfigError("lr_scale must be positive");
}

std::string metrics_csv(const std::vector<MetricsRecord>& history) {
  std::ostringstream out;
  out.precision(9);
  out << "epoch,split,loss,accuracy\n";
  for (const auto& m : history) out << m.epoch << ',' << m.split << ',' << m.loss << ',' << m.accuracy << '\n';
  return out.str();
}

double token_accuracy(std::span<const float> logits, std::size_t vocab, std::span<const int> targets,
                      std::span<const std::uint8_t> keep) {
  return accuracy_impl(logits, vocab, targets, keep);
}

double token_accuracy(std::span<const double> logits, std::size_t vocab, std::span<const int> targets,
                      std::span<const std::uint8_t> keep) {
  return accuracy_impl(logits, vocab, targets, keep);
}

TrainProfile desk_profile() {
  TrainProfile p;
  p.model.d_model = 64;
  p.model.n_enc = 2;
  p.model.n_dec = 2;
  p.train.batch_size = 64;
  p.train.epochs = 10;
  return p;
}

TrainProfile paper_profile() {
  TrainProfile p;
  p.train.batch_size = 1024;
  p.train.epochs = 100;
  return p;
}

}  // namespace srforge
