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

#include "srforge/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "srforge/parallel.hpp"

namespace srforge {
namespace {

constexpr std::uint64_t kBankStream = hash_name("skeleton-bank");
constexpr std::uint64_t kRealizeStream = hash_name("realize");
constexpr std::uint64_t kSplitStream = hash_name("split");

// Chunked so a million raw samples never live in memory at once.
constexpr std::size_t kBankChunk = 1 << 15;

struct Candidate {
  std::optional<ExprTree> tree;
  SkeletonVerdict verdict = SkeletonVerdict::kValid;
};

}  // namespace

void GenerationConfig::validate() const {
  for (int i = token_id(Token::kConst); i <= token_id(Token::kX6); ++i) {
    if (!(vocabulary.weight(static_cast<Token>(i)) > 0.0)) {
      throw std::invalid_argument("leaf sampling weights must be positive");
    }
  }
  if (!(const_min <= const_max)) throw std::invalid_argument("constant range is not ordered");
  if (!(var_min > 0.0 && var_min <= var_max)) {
    throw std::invalid_argument("variable range must be positive and ordered");
  }
  if (n_rows < 1) throw std::invalid_argument("n_rows must be at least 1");
  if (node_budget < 1) throw std::invalid_argument("node_budget must be at least 1");
  if (!(y_cap > 0.0)) throw std::invalid_argument("y_cap must be positive");
}

ExprTree sample_skeleton(Rng& rng, const GenerationConfig& config) {
  const auto& weights = config.vocabulary.weights();
  TokenSequence seq;
  std::size_t open = 1;
  std::array<double, kNumGenerative> allowed{};
  while (open > 0) {
    // An operator of arity a needs the finished tree to hold at least
    // placed + open + a nodes.
    for (int i = 0; i < kNumGenerative; ++i) {
      const int arity = token_arity(static_cast<Token>(i));
      const bool fits = seq.size() + open + static_cast<std::size_t>(arity) <= config.node_budget;
      allowed[i] = (arity == 0 || fits) ? weights[i] : 0.0;
    }
    std::discrete_distribution<int> pick(allowed.begin(), allowed.end());
    const Token t = static_cast<Token>(pick(rng));
    seq.push_back(t);
    open = open - 1 + static_cast<std::size_t>(token_arity(t));
  }
  return preorder_parse(seq);
}

SkeletonBank build_skeleton_bank(const GenerationConfig& config) {
  config.validate();
  SkeletonBank bank;
  bank.stats.raw = config.n_raw_samples;
  std::unordered_set<std::string> seen;
  std::vector<Candidate> chunk;

  for (std::size_t begin = 0; begin < config.n_raw_samples; begin += kBankChunk) {
    const std::size_t end = std::min(config.n_raw_samples, begin + kBankChunk);
    chunk.assign(end - begin, Candidate{});
    ParallelErrors errors;
#pragma omp parallel for schedule(dynamic, 256)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(chunk.size()); ++k) {
      errors.run([&] {
        Rng rng(derive_seed(config.seed, kBankStream, begin + static_cast<std::size_t>(k)));
        ExprTree tree = simplify(sample_skeleton(rng, config));
        Candidate& c = chunk[static_cast<std::size_t>(k)];
        c.verdict = validate_skeleton(tree, config.max_tokens);
        if (c.verdict == SkeletonVerdict::kValid) c.tree = std::move(tree);
      });
    }
    errors.rethrow();

    for (auto& c : chunk) {
      switch (c.verdict) {
        case SkeletonVerdict::kSingleLeaf: ++bank.stats.single_leaf; continue;
        case SkeletonVerdict::kNoConstant: ++bank.stats.no_constant; continue;
        case SkeletonVerdict::kNoVariable: ++bank.stats.no_variable; continue;
        case SkeletonVerdict::kTooLong: ++bank.stats.too_long; continue;
        case SkeletonVerdict::kValid: break;
      }
      ++bank.stats.valid;
      if (!seen.insert(canonical_key(*c.tree)).second) continue;
      Skeleton s;
      s.id = static_cast<std::uint32_t>(bank.skeletons.size());
      s.tokens = preorder_serialize(*c.tree);
      s.tree = std::move(*c.tree);
      bank.skeletons.push_back(std::move(s));
    }
  }
  bank.stats.unique = bank.skeletons.size();
  return bank;
}

std::uint64_t realization_seed(const GenerationConfig& config, std::uint32_t skeleton_id,
                               std::size_t index) {
  return derive_seed(config.seed, kRealizeStream ^ (std::uint64_t{skeleton_id} << 20), index);
}

RealizeOutcome realize(const Skeleton& skeleton, std::uint64_t seed, const GenerationConfig& config) {
  Rng rng(seed);
  std::uniform_real_distribution<double> const_dist(config.const_min, config.const_max);
  std::uniform_real_distribution<double> log_var(std::log(config.var_min), std::log(config.var_max));

  std::vector<double> consts(static_cast<std::size_t>(skeleton.tree.count(Token::kConst)));
  for (double& c : consts) c = const_dist(rng);
  const unsigned mask = skeleton.tree.variable_mask();

  TabularDataset ds;
  ds.skeleton_id = skeleton.id;
  ds.seed = seed;
  ds.n_rows = config.n_rows;
  ds.values.assign(config.n_rows * kTableCols, 0.0f);
  ds.ground_truth = skeleton.tokens;

  RealizeOutcome out;
  for (std::size_t r = 0; r < config.n_rows; ++r) {
    VariableValues vars{};
    for (int v = 0; v < kNumVariables; ++v) {
      if (!(mask & (1u << v))) continue;
      // Round to storage precision first so y is exact for the stored inputs.
      const float x = static_cast<float>(std::exp(log_var(rng)));
      vars[v] = x;
      ds.at(r, 1 + static_cast<std::size_t>(v)) = x;
    }
    const EvalResult y = try_evaluate(skeleton.tree, vars, consts);
    if (!y.ok) {
      out.failure = y.error == EvalError::Kind::kNonFinite ? RealizeFailure::kMagnitude
                                                            : RealizeFailure::kDomain;
      return out;
    }
    if (std::abs(y.value) > config.y_cap) {
      out.failure = RealizeFailure::kMagnitude;
      return out;
    }
    ds.at(r, 0) = static_cast<float>(y.value);
  }
  out.dataset = std::move(ds);
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n) {
  const auto train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  const auto val = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
  return {train, val, n - train - val};
}

CorpusSplit build_corpus(const std::vector<Skeleton>& bank, const GenerationConfig& config) {
  config.validate();
  if (bank.empty()) throw std::invalid_argument("skeleton bank is empty");

  struct PerSkeleton {
    std::vector<TabularDataset> datasets;
    std::size_t domain = 0;
    std::size_t magnitude = 0;
  };
  std::vector<PerSkeleton> results(bank.size());
  ParallelErrors errors;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(bank.size()); ++k) {
    errors.run([&] {
      const Skeleton& s = bank[static_cast<std::size_t>(k)];
      PerSkeleton& out = results[static_cast<std::size_t>(k)];
      for (std::size_t r = 0; r < config.n_realizations; ++r) {
        RealizeOutcome o = realize(s, realization_seed(config, s.id, r), config);
        if (o.dataset) {
          out.datasets.push_back(std::move(*o.dataset));
        } else if (o.failure == RealizeFailure::kDomain) {
          ++out.domain;
        } else {
          ++out.magnitude;
        }
      }
    });
  }
  errors.rethrow();

  CorpusSplit corpus;
  corpus.skeletons = bank;
  for (auto& r : results) {
    corpus.stats.rejected_domain += r.domain;
    corpus.stats.rejected_magnitude += r.magnitude;
    for (auto& d : r.datasets) corpus.datasets.push_back(std::move(d));
  }
  corpus.stats.attempted = bank.size() * config.n_realizations;
  corpus.stats.realized = corpus.datasets.size();

  std::vector<std::size_t> order(corpus.datasets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, kSplitStream));
  std::shuffle(order.begin(), order.end(), rng);
  const auto sizes = split_sizes(order.size());
  corpus.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes[0]));
  corpus.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(sizes[0]),
                           order.begin() + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]));
  corpus.test.assign(order.begin() + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]), order.end());
  return corpus;
}

TabularDataset permute_columns(const TabularDataset& dataset, const std::array<int, kNumVariables>& perm) {
  std::array<bool, kNumVariables> used{};
  for (int p : perm) {
    if (p < 0 || p >= kNumVariables || used[p]) throw std::invalid_argument("not a permutation");
    used[p] = true;
  }
  TabularDataset out = dataset;
  for (std::size_t r = 0; r < dataset.n_rows; ++r) {
    for (int v = 0; v < kNumVariables; ++v) {
      out.at(r, 1 + static_cast<std::size_t>(perm[v])) = dataset.at(r, 1 + static_cast<std::size_t>(v));
    }
  }
  for (Token& t : out.ground_truth) {
    if (is_variable(t)) t = variable_token(perm[variable_index(t)]);
  }
  return out;
}

TabularDataset augment_permute_columns(const TabularDataset& dataset, Rng& rng) {
  std::array<int, kNumVariables> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return permute_columns(dataset, perm);
}

std::vector<std::string> audit_corpus(const CorpusSplit& corpus, double y_cap) {
  std::vector<std::string> problems;
  const std::size_t n = corpus.datasets.size();
  for (std::size_t i = 0; i < n; ++i) {
    const TabularDataset& d = corpus.datasets[i];
    const std::string where = "dataset " + std::to_string(i) + ": ";
    if (d.values.size() != d.n_rows * kTableCols) {
      problems.push_back(where + "matrix size mismatch");
      continue;
    }
    unsigned mask = 0;
    try {
      mask = preorder_parse(d.ground_truth).variable_mask();
    } catch (const std::exception& e) {
      problems.push_back(where + "invalid ground truth: " + e.what());
      continue;
    }
    for (std::size_t r = 0; r < d.n_rows; ++r) {
      for (std::size_t c = 0; c < kTableCols; ++c) {
        const float v = d.at(r, c);
        if (!std::isfinite(v)) problems.push_back(where + "non-finite entry");
        if (c >= 1 && !(mask & (1u << (c - 1))) && v != 0.0f) {
          problems.push_back(where + "unused column " + std::to_string(c) + " not zero");
        }
      }
      if (std::abs(d.at(r, 0)) > y_cap) problems.push_back(where + "|y| above cap");
    }
  }
  std::vector<int> owner(n, 0);
  for (const auto* part : {&corpus.train, &corpus.validation, &corpus.test}) {
    for (std::size_t i : *part) {
      if (i >= n) {
        problems.push_back("split index out of range");
        continue;
      }
      ++owner[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] != 1) problems.push_back("dataset " + std::to_string(i) + " is not in exactly one split");
  }
  return problems;
}

}  // namespace srforge
