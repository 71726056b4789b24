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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srforge/expr_tree.hpp"
#include "srforge/rng.hpp"
#include "srforge/simplify.hpp"

namespace srforge {

/// Columns of a tabular dataset: y, x1..x6.
inline constexpr std::size_t kTableCols = 7;
inline constexpr std::size_t kDefaultRows = 50;

struct GenerationConfig {
  Vocabulary vocabulary;
  std::size_t n_raw_samples = 1'000'000;
  std::size_t max_tokens = kMaxSkeletonTokens;
  /// Operators are only drawn while the tree can still close within this many nodes.
  std::size_t node_budget = 30;
  double const_min = -100.0;
  double const_max = 100.0;
  double var_min = 0.1;
  double var_max = 10.0;
  std::size_t n_rows = kDefaultRows;
  std::size_t n_realizations = 100;
  double y_cap = 1e9;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when the configuration is unusable.
  void validate() const;
};

struct Skeleton {
  std::uint32_t id = 0;
  ExprTree tree = ExprTree::leaf(Token::kConst);
  TokenSequence tokens;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

struct BankStats {
  std::size_t raw = 0;
  std::size_t valid = 0;
  std::size_t unique = 0;
  std::size_t single_leaf = 0;
  std::size_t no_constant = 0;
  std::size_t no_variable = 0;
  std::size_t too_long = 0;
};

struct SkeletonBank {
  std::vector<Skeleton> skeletons;
  BankStats stats;
};

/// A (n_rows, 7) table in row-major order with its ground-truth skeleton.
struct TabularDataset {
  std::uint32_t skeleton_id = 0;
  std::uint64_t seed = 0;
  std::size_t n_rows = kDefaultRows;
  std::vector<float> values;
  TokenSequence ground_truth;

  float at(std::size_t row, std::size_t col) const { return values[row * kTableCols + col]; }
  float& at(std::size_t row, std::size_t col) { return values[row * kTableCols + col]; }

  friend bool operator==(const TabularDataset&, const TabularDataset&) = default;
};

enum class RealizeFailure { kDomain, kMagnitude };

struct RealizeOutcome {
  std::optional<TabularDataset> dataset;
  RealizeFailure failure = RealizeFailure::kDomain;
};

struct CorpusStats {
  std::size_t attempted = 0;
  std::size_t realized = 0;
  std::size_t rejected_domain = 0;
  std::size_t rejected_magnitude = 0;
};

/// All realized datasets plus an 80/10/10 partition of their indices.
struct CorpusSplit {
  std::vector<Skeleton> skeletons;
  std::vector<TabularDataset> datasets;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  CorpusStats stats;

  friend bool operator==(const CorpusSplit& a, const CorpusSplit& b) {
    return a.skeletons == b.skeletons && a.datasets == b.datasets && a.train == b.train &&
           a.validation == b.validation && a.test == b.test;
  }
};

/// Weighted pre-order sampling of one skeleton.
ExprTree sample_skeleton(Rng& rng, const GenerationConfig& config);

/// sample -> simplify -> validate -> dedup by canonical key. Survivor ids are
/// assigned in order of first appearance.
SkeletonBank build_skeleton_bank(const GenerationConfig& config);

/// Samples constants and variable rows for `skeleton`. Unused variable columns
/// stay zero. The outcome depends only on (skeleton, seed, config).
RealizeOutcome realize(const Skeleton& skeleton, std::uint64_t seed, const GenerationConfig& config);

/// Seed of realization `index` of skeleton `skeleton_id`.
std::uint64_t realization_seed(const GenerationConfig& config, std::uint32_t skeleton_id,
                               std::size_t index);

/// Realizes every skeleton n_realizations times, drops rejections, shuffles
/// and splits 80/10/10 by dataset.
CorpusSplit build_corpus(const std::vector<Skeleton>& bank, const GenerationConfig& config);

/// Split sizes (train, validation, test) for n datasets.
std::array<std::size_t, 3> split_sizes(std::size_t n);

/// Moves variable column i to column perm[i] and renames x_{i+1} to
/// x_{perm[i]+1} in the ground truth. y stays in column 0.
TabularDataset permute_columns(const TabularDataset& dataset, const std::array<int, kNumVariables>& perm);

/// permute_columns with a uniformly random permutation.
TabularDataset augment_permute_columns(const TabularDataset& dataset, Rng& rng);

/// Checks every dataset invariant; returns one message per violation.
std::vector<std::string> audit_corpus(const CorpusSplit& corpus, double y_cap = 1e9);

}  // namespace srforge
