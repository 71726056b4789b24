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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "srforge/corpus_io.hpp"
#include "srforge/datagen.hpp"
#include "srforge/parallel.hpp"
#include "test_support.hpp"

namespace srforge {
namespace {

using testing::tree;

Skeleton skeleton(std::string_view text, std::uint32_t id = 0) {
  Skeleton s;
  s.id = id;
  s.tree = tree(text);
  s.tokens = preorder_serialize(s.tree);
  return s;
}

GenerationConfig small_config(std::uint64_t seed = 3) {
  GenerationConfig c;
  c.n_raw_samples = 400;
  c.n_realizations = 4;
  c.seed = seed;
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("srforge_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

TEST_CASE("config validation") {
  GenerationConfig c;
  c.vocabulary.set_weight(Token::kX3, 0.0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  GenerationConfig d;
  d.var_min = 5.0;
  d.var_max = 1.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  GenerationConfig e;
  e.n_rows = 0;
  CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("sampler limits") {
  GenerationConfig c;
  c.node_budget = 1;
  Rng rng(1);
  for (int i = 0; i < 200; ++i) CHECK(sample_skeleton(rng, c).node_count() == 1);

  GenerationConfig x1_only;
  for (int id = 0; id < kNumGenerative; ++id) x1_only.vocabulary.set_weight(token_from_id(id), 1e-12);
  x1_only.vocabulary.set_weight(Token::kX1, 1.0);
  for (int i = 0; i < 100; ++i) CHECK(sample_skeleton(rng, x1_only) == tree("x1"));

  GenerationConfig d;
  d.node_budget = 9;
  for (int i = 0; i < 2000; ++i) CHECK(sample_skeleton(rng, d).node_count() <= 9);
}

TEST_CASE("skeleton bank filters and dedup") {
  GenerationConfig c;
  c.n_raw_samples = 1000;
  c.seed = 0;
  const SkeletonBank bank = build_skeleton_bank(c);
  CHECK(bank.stats.raw == 1000);
  CHECK(bank.stats.valid <= bank.stats.raw);
  CHECK(bank.stats.unique <= bank.stats.valid);
  CHECK(bank.stats.unique > 0);
  CHECK(bank.stats.unique < 1000);
  CHECK(bank.stats.valid + bank.stats.single_leaf + bank.stats.no_constant + bank.stats.no_variable +
            bank.stats.too_long ==
        bank.stats.raw);
  // Regression value for this seed and the default weights.
  CHECK(bank.stats.unique == 174);
  std::set<std::string> keys;
  for (std::size_t i = 0; i < bank.skeletons.size(); ++i) {
    const Skeleton& s = bank.skeletons[i];
    CHECK(s.id == i);
    CHECK(validate_skeleton(s.tree) == SkeletonVerdict::kValid);
    CHECK(s.tokens.size() <= 30);
    CHECK(simplify(s.tree) == s.tree);
    CHECK(keys.insert(canonical_key(s.tree)).second);
  }
}

TEST_CASE("bank does not depend on the thread count") {
  GenerationConfig c = small_config(9);
  c.n_raw_samples = 3000;
  const int saved = thread_count();
  set_thread_count(1);
  const SkeletonBank a = build_skeleton_bank(c);
  set_thread_count(4);
  const SkeletonBank b = build_skeleton_bank(c);
  set_thread_count(saved);
  CHECK(a.skeletons == b.skeletons);
}

TEST_CASE("realization") {
  const GenerationConfig c;
  const RealizeOutcome bad = realize(skeleton("log mul neg x1 x2"), 1, c);
  CHECK_FALSE(bad.dataset);
  CHECK(bad.failure == RealizeFailure::kDomain);

  GenerationConfig big = c;
  big.const_min = 50.0;
  const RealizeOutcome huge = realize(skeleton("mul C exp mul x1 x1"), 1, big);
  CHECK_FALSE(huge.dataset);
  CHECK(huge.failure == RealizeFailure::kMagnitude);

  const RealizeOutcome ok = realize(skeleton("add mul C x1 x2"), 5, c);
  REQUIRE(ok.dataset);
  const TabularDataset& d = *ok.dataset;
  CHECK(d.n_rows == 50);
  CHECK(d.values.size() == 350);
  for (std::size_t r = 0; r < 50; ++r) {
    for (std::size_t col = 3; col < 7; ++col) CHECK(d.at(r, col) == 0.0f);
    CHECK(d.at(r, 1) >= 0.1f);
    CHECK(d.at(r, 1) <= 10.0f);
  }
  CHECK(realize(skeleton("add mul C x1 x2"), 5, c).dataset == ok.dataset);
}

TEST_CASE("variable draws are log-uniform") {
  const GenerationConfig c;
  const Skeleton s = skeleton("mul C add x1 add x2 add x3 add x4 add x5 x6");
  std::vector<double> logs;
  for (std::uint64_t seed = 0; logs.size() < 100000; ++seed) {
    const RealizeOutcome o = realize(s, seed, c);
    REQUIRE(o.dataset);
    for (std::size_t r = 0; r < 50 && logs.size() < 100000; ++r) {
      for (std::size_t col = 1; col < 7 && logs.size() < 100000; ++col) {
        logs.push_back(std::log(static_cast<double>(o.dataset->at(r, col))));
      }
    }
  }
  std::sort(logs.begin(), logs.end());
  const double lo = std::log(0.1), hi = std::log(10.0);
  const double n = static_cast<double>(logs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const double f = std::clamp((logs[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  // Asymptotic Kolmogorov-Smirnov critical value at alpha = 0.01.
  CHECK(d < 1.6276 / std::sqrt(n));
}

TEST_CASE("corpus partition and determinism") {
  const GenerationConfig c = small_config();
  const SkeletonBank bank = build_skeleton_bank(c);
  const CorpusSplit corpus = build_corpus(bank.skeletons, c);
  const std::size_t n = corpus.datasets.size();
  CHECK(corpus.stats.realized == n);
  CHECK(corpus.stats.attempted == bank.skeletons.size() * c.n_realizations);
  CHECK(corpus.stats.realized + corpus.stats.rejected_domain + corpus.stats.rejected_magnitude ==
        corpus.stats.attempted);
  CHECK(corpus.train.size() + corpus.validation.size() + corpus.test.size() == n);
  CHECK(std::abs(static_cast<double>(corpus.train.size()) - 0.8 * static_cast<double>(n)) <= 1.0);
  CHECK(std::abs(static_cast<double>(corpus.validation.size()) - 0.1 * static_cast<double>(n)) <= 1.0);
  std::vector<std::size_t> all = corpus.train;
  all.insert(all.end(), corpus.validation.begin(), corpus.validation.end());
  all.insert(all.end(), corpus.test.begin(), corpus.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  CHECK(audit_corpus(corpus).empty());
  CHECK(build_corpus(bank.skeletons, c) == corpus);
}

TEST_CASE("split sizes") {
  CHECK(split_sizes(10) == std::array<std::size_t, 3>{8, 1, 1});
  CHECK(split_sizes(0) == std::array<std::size_t, 3>{0, 0, 0});
  for (std::size_t n = 0; n < 200; ++n) {
    const auto s = split_sizes(n);
    CHECK(s[0] + s[1] + s[2] == n);
  }
}

TEST_CASE("audit catches broken datasets") {
  const GenerationConfig c = small_config();
  CorpusSplit corpus = build_corpus(build_skeleton_bank(c).skeletons, c);
  REQUIRE_FALSE(corpus.datasets.empty());
  corpus.datasets[0].at(0, 0) = std::nanf("");
  CHECK_FALSE(audit_corpus(corpus).empty());
}

TEST_CASE("column permutation augmentation") {
  TabularDataset d;
  d.values.assign(350, 0.0f);
  d.ground_truth = preorder_serialize(tree("add log x1 mul x1 x2"));
  for (std::size_t r = 0; r < 50; ++r) {
    d.at(r, 0) = static_cast<float>(r);
    d.at(r, 1) = 1.0f + static_cast<float>(r);
    d.at(r, 2) = 2.0f + static_cast<float>(r);
  }
  const TabularDataset swapped = permute_columns(d, {1, 0, 2, 3, 4, 5});
  CHECK(swapped.ground_truth == preorder_serialize(tree("add log x2 mul x2 x1")));
  CHECK(swapped.at(3, 1) == d.at(3, 2));
  CHECK(swapped.at(3, 2) == d.at(3, 1));
  CHECK(swapped.at(3, 0) == d.at(3, 0));
  CHECK(permute_columns(d, {0, 1, 2, 3, 4, 5}) == d);

  Rng rng(8);
  const Skeleton s = skeleton("add mul C x1 mul x2 log x3");
  const RealizeOutcome o = realize(s, 21, GenerationConfig{});
  REQUIRE(o.dataset);
  for (int trial = 0; trial < 20; ++trial) {
    const TabularDataset p = augment_permute_columns(*o.dataset, rng);
    const ExprTree t = preorder_parse(p.ground_truth);
    const double consts[] = {1.5};
    for (std::size_t r = 0; r < 5; ++r) {
      VariableValues a{}, b{};
      for (std::size_t v = 0; v < 6; ++v) {
        a[v] = o.dataset->at(r, v + 1);
        b[v] = p.at(r, v + 1);
      }
      CHECK(evaluate(s.tree, a, consts) == doctest::Approx(evaluate(t, b, consts)));
    }
  }
}

TEST_CASE("corpus persistence") {
  const GenerationConfig c = small_config();
  const CorpusSplit corpus = build_corpus(build_skeleton_bank(c).skeletons, c);
  const auto dir = temp_dir("corpus");
  write_corpus(corpus, dir);
  CHECK(read_corpus(dir) == corpus);

  {
    std::fstream f(dir / "data.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  CHECK_THROWS_AS(read_corpus(dir), CorpusFormatError);

  CorpusSplit empty;
  const auto edir = temp_dir("empty_corpus");
  write_corpus(empty, edir);
  const CorpusSplit back = read_corpus(edir);
  CHECK(back.datasets.empty());
  CHECK(back.train.empty());
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(edir);
}

TEST_CASE("truncated and version-mismatched corpora are rejected") {
  const GenerationConfig c = small_config();
  const CorpusSplit corpus = build_corpus(build_skeleton_bank(c).skeletons, c);
  const auto dir = temp_dir("corrupt");
  write_corpus(corpus, dir);
  const auto size = std::filesystem::file_size(dir / "data.bin");
  std::filesystem::resize_file(dir / "data.bin", size - 3);
  CHECK_THROWS_AS(read_corpus(dir), CorpusFormatError);
  write_corpus(corpus, dir);
  {
    std::fstream f(dir / "data.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    f.put(static_cast<char>(9));
  }
  CHECK_THROWS_AS(read_corpus(dir), CorpusFormatError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace srforge
