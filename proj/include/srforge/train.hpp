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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/datagen.hpp"
#include "srforge/model.hpp"
#include "srforge/optim.hpp"

namespace srforge {

/// Training produced a non-finite loss or gradient.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t batch_size = 64;
  std::size_t epochs = 1;
  double label_smoothing = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t warmup_steps = 4000;
  double lr_scale = 1.0;
  /// Stop after this many optimizer steps in total; 0 means no limit.
  std::uint64_t max_steps = 0;
  /// Write a checkpoint every this many epochs (0: final only).
  std::size_t checkpoint_every = 1;
  /// Directory for metrics.csv and checkpoint.bin; empty disables output.
  std::filesystem::path out_dir;
  /// Evaluate validation and test splits after each epoch.
  bool eval_splits = true;
  std::size_t eval_batch = 256;

  void validate() const;
};

struct MetricsRecord {
  std::size_t epoch = 0;
  std::string split;
  double loss = 0.0;
  double accuracy = 0.0;
};

/// CSV header `epoch,split,loss,accuracy` followed by one line per record.
std::string metrics_csv(const std::vector<MetricsRecord>& history);

/// Token-wise accuracy: fraction of kept positions where the argmax of the
/// logits row equals the target. Throws std::invalid_argument if none kept.
double token_accuracy(std::span<const float> logits, std::size_t vocab, std::span<const int> targets,
                      std::span<const std::uint8_t> keep);
double token_accuracy(std::span<const double> logits, std::size_t vocab, std::span<const int> targets,
                      std::span<const std::uint8_t> keep);

struct TrainProfile {
  ModelConfig model;
  TrainConfig train;
};
/// d_model 64, 2 encoder and 2 decoder layers, batch 64.
TrainProfile desk_profile();
/// d_model 256, 4 encoder and 8 decoder layers, batch 1024, 100 epochs.
TrainProfile paper_profile();

inline namespace SRFORGE_PRECISION {

/// Teacher-forcing inputs for a set of datasets.
struct Batch {
  std::size_t batch = 0;
  /// Decoder positions fed per sequence (max_len - 1).
  std::size_t len = 0;
  Tensor tables;                    // [batch, n_rows, 7]
  std::vector<int> decoder_input;   // [batch, len]: SOS, t1..tk, PAD...
  std::vector<int> targets;         // [batch * len]: decoder input shifted by one
  std::vector<std::uint8_t> keep;   // target is not PAD
};

/// Throws std::invalid_argument if a ground truth exceeds max_len - 1 tokens
/// or a table shape disagrees with the config.
Batch make_batch(std::span<const TabularDataset* const> datasets, const ModelConfig& cfg);

struct StepStats {
  std::uint64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Forward, backward and one Adam update on `batch`.
StepStats train_step(Model& model, const Batch& batch, double label_smoothing, const ScheduleConfig& schedule,
                     std::uint64_t dropout_seed);

struct SplitMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Loss and token accuracy with dropout disabled, weighted by kept tokens.
SplitMetrics evaluate_split(Model& model, const std::vector<TabularDataset>& datasets,
                            std::span<const std::size_t> indices, double label_smoothing,
                            std::size_t batch_size);

struct TrainResult {
  std::vector<MetricsRecord> history;
  std::vector<StepStats> steps;
};

/// Epoch loop over corpus.train up to epoch cfg.epochs. A model that has
/// already taken optimizer steps resumes at epoch step / steps_per_epoch + 1.
/// The train split records the running mean of the epoch's step statistics.
/// With an out_dir, metrics.csv is appended to on resume.
TrainResult train(Model& model, const CorpusSplit& corpus, const TrainConfig& cfg,
                  const std::function<void(const StepStats&)>& on_step = {});

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
