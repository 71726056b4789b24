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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "srforge/checkpoint.hpp"
#include "srforge/datagen.hpp"
#include "srforge/train.hpp"

namespace srforge {
namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.d_model = 16;
  cfg.n_enc = 1;
  cfg.n_dec = 1;
  cfg.heads = 2;
  cfg.n_rows = 50;
  cfg.p_drop = 0.1;
  return cfg;
}

const CorpusSplit& small_corpus() {
  static const CorpusSplit corpus = [] {
    GenerationConfig g;
    g.n_raw_samples = 400;
    g.n_realizations = 2;
    g.seed = 3;
    return build_corpus(build_skeleton_bank(g).skeletons, g);
  }();
  return corpus;
}

TabularDataset dataset_with(std::string_view truth) {
  TabularDataset d;
  d.n_rows = 50;
  d.values.assign(50 * kTableCols, 0.0f);
  for (std::size_t r = 0; r < 50; ++r) {
    d.at(r, 1) = 0.1f + 0.2f * static_cast<float>(r);
    d.at(r, 0) = 2.0f * d.at(r, 1);
  }
  d.ground_truth = sequence_from_text(truth);
  return d;
}

TEST_CASE("batch assembly") {
  const TabularDataset a = dataset_with("add mul C x1 mul C sin mul C x1");
  REQUIRE(a.ground_truth.size() == 10);
  const TabularDataset eight = dataset_with("add x1 add x1 add x1 neg x1");
  REQUIRE(eight.ground_truth.size() == 8);
  const std::vector<const TabularDataset*> ptrs{&a, &eight};
  const Batch batch = make_batch(ptrs, tiny_config());
  CHECK(batch.len == 30);
  CHECK(batch.tables.shape() == Shape{2, 50, 7});
  CHECK(batch.decoder_input[0] == token_id(Token::kSos));
  CHECK(batch.decoder_input[30] == token_id(Token::kSos));
  CHECK(batch.targets[0] == token_id(Token::kAdd));
  CHECK(batch.targets[30] == token_id(Token::kAdd));
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(batch.decoder_input[i + 1] == token_id(a.ground_truth[i]));
    CHECK(batch.targets[i] == token_id(a.ground_truth[i]));
  }
  std::size_t masked = 0;
  for (std::size_t i = 30; i < 60; ++i) {
    masked += batch.keep[i] == 0;
    if (batch.keep[i] == 0) CHECK(batch.targets[i] == token_id(Token::kPad));
  }
  CHECK(masked == 22);
  CHECK(batch.tables[50 * 7 + 1] == eight.at(0, 1));

  TabularDataset too_long = a;
  too_long.ground_truth.assign(31, Token::kX1);
  const std::vector<const TabularDataset*> bad{&too_long};
  CHECK_THROWS_AS(make_batch(bad, tiny_config()), std::invalid_argument);
  too_long.ground_truth.assign(30, Token::kX1);
  CHECK(make_batch(bad, tiny_config()).keep[29] == 1);
  TabularDataset short_table = a;
  short_table.n_rows = 10;
  short_table.values.resize(70);
  const std::vector<const TabularDataset*> bad_rows{&short_table};
  CHECK_THROWS_AS(make_batch(bad_rows, tiny_config()), std::invalid_argument);
}

TEST_CASE("token accuracy") {
  const std::vector<int> targets{1, 2, 3, 0};
  std::vector<float> hit(4 * 4, 0.0f), miss(4 * 4, 0.0f), half(4 * 4, 0.0f);
  for (std::size_t i = 0; i < 4; ++i) {
    hit[i * 4 + static_cast<std::size_t>(targets[i])] = 1.0f;
    miss[i * 4 + (static_cast<std::size_t>(targets[i]) + 1) % 4] = 1.0f;
    half[i * 4 + (i < 2 ? static_cast<std::size_t>(targets[i]) : 0)] = 1.0f;
  }
  const std::vector<std::uint8_t> keep{1, 1, 1, 0};
  CHECK(token_accuracy(hit, 4, targets, keep) == 1.0);
  CHECK(token_accuracy(miss, 4, targets, keep) == 0.0);
  const std::vector<std::uint8_t> first_three{1, 1, 1, 1};
  std::vector<double> half_d(half.begin(), half.end());
  CHECK(token_accuracy(half_d, 4, targets, first_three) == 0.75);
  const std::vector<std::uint8_t> two{1, 0, 1, 0};
  CHECK(token_accuracy(half, 4, targets, two) == 0.5);
  const std::vector<std::uint8_t> none{0, 0, 0, 0};
  CHECK_THROWS_AS(token_accuracy(hit, 4, targets, none), std::invalid_argument);
}

TEST_CASE("metrics csv and profiles") {
  const std::string csv = metrics_csv({{1, "train", 2.5, 0.25}, {1, "validation", 3.0, 0.5}});
  CHECK(csv == "epoch,split,loss,accuracy\n1,train,2.5,0.25\n1,validation,3,0.5\n");
  const TrainProfile desk = desk_profile();
  CHECK(desk.model.d_model == 64);
  CHECK(desk.model.n_enc == 2);
  CHECK(desk.model.n_dec == 2);
  CHECK(desk.train.batch_size == 64);
  const TrainProfile paper = paper_profile();
  CHECK(paper.model.d_model == 256);
  CHECK(paper.model.n_dec == 8);
  CHECK(paper.train.batch_size == 1024);
  TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("loss on a fixed batch decreases for 50 steps") {
  ModelConfig cfg = tiny_config();
  cfg.d_model = 32;
  cfg.p_drop = 0.0;
  Model m(cfg, 21);
  const CorpusSplit& corpus = small_corpus();
  std::vector<const TabularDataset*> ptrs;
  for (std::size_t i = 0; i < 8; ++i) ptrs.push_back(&corpus.datasets[corpus.train[i]]);
  const Batch batch = make_batch(ptrs, cfg);
  const ScheduleConfig schedule{cfg.d_model, 4000, 1.0};
  double previous = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= 50; ++step) {
    const StepStats s = train_step(m, batch, 0.0, schedule, 0);
    INFO("step ", step, " loss ", s.loss);
    CHECK(s.loss < previous);
    CHECK(s.step == static_cast<std::uint64_t>(step));
    previous = s.loss;
  }
}

TEST_CASE("label smoothing raises the loss plateau") {
  const TabularDataset d = dataset_with("mul C x1");
  const std::vector<const TabularDataset*> ptrs{&d};
  ModelConfig cfg = tiny_config();
  cfg.p_drop = 0.0;
  const ScheduleConfig schedule{cfg.d_model, 50, 1.0};
  double final_loss[2] = {0, 0};
  for (int k = 0; k < 2; ++k) {
    Model m(cfg, 22);
    const Batch batch = make_batch(ptrs, cfg);
    for (int step = 0; step < 300; ++step) final_loss[k] = train_step(m, batch, k * 0.1, schedule, 0).loss;
  }
  CHECK(final_loss[0] < 0.05);
  CHECK(final_loss[1] > final_loss[0] + 0.1);
}

TEST_CASE("tiny overfit reproduces its ground truth") {
  const TabularDataset d = dataset_with("add x1 mul C sin x1");
  const std::vector<const TabularDataset*> ptrs{&d};
  ModelConfig cfg = tiny_config();
  cfg.p_drop = 0.0;
  Model m(cfg, 23);
  const Batch batch = make_batch(ptrs, cfg);
  for (int step = 0; step < 300; ++step) train_step(m, batch, 0.0, {cfg.d_model, 50, 1.0}, 0);
  const Tensor table({50, 7}, std::vector<real>(d.values.begin(), d.values.end()));
  CHECK(to_text(m.greedy_decode(table)) == "add x1 mul C sin x1");
}

TEST_CASE("non-finite loss aborts training") {
  Model m(tiny_config(), 24);
  m.params().at("dec.out.b").value[0] = std::numeric_limits<real>::quiet_NaN();
  const TabularDataset d = dataset_with("mul C x1");
  const std::vector<const TabularDataset*> ptrs{&d};
  CHECK_THROWS_AS(train_step(m, make_batch(ptrs, m.config()), 0.0, {16, 10, 1.0}, 0), NumericError);
}

TrainConfig small_train(std::size_t epochs) {
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.epochs = epochs;
  cfg.seed = 5;
  cfg.warmup_steps = 20;
  cfg.eval_batch = 64;
  return cfg;
}

TEST_CASE("training is deterministic and the step counter is global") {
  const CorpusSplit& corpus = small_corpus();
  REQUIRE(corpus.train.size() > 32);
  Model a(tiny_config(), 25), b(tiny_config(), 25);
  const TrainResult ra = train(a, corpus, small_train(2));
  const TrainResult rb = train(b, corpus, small_train(2));
  REQUIRE(ra.history.size() == 6);
  for (std::size_t i = 0; i < ra.history.size(); ++i) {
    CHECK(ra.history[i].loss == rb.history[i].loss);
    CHECK(ra.history[i].accuracy == rb.history[i].accuracy);
    CHECK(ra.history[i].accuracy >= 0.0);
    CHECK(ra.history[i].accuracy <= 1.0);
  }
  CHECK(ra.history.back().epoch == 2);
  CHECK(ra.history[1].split == "validation");
  CHECK(ra.history[2].split == "test");
  for (std::size_t i = 0; i < ra.steps.size(); ++i) CHECK(ra.steps[i].step == i + 1);
  CHECK(a.params().at("dec.out.w").value == b.params().at("dec.out.w").value);

  const SplitMetrics v1 = evaluate_split(a, corpus.datasets, corpus.validation, 0.0, 7);
  const SplitMetrics v2 = evaluate_split(a, corpus.datasets, corpus.validation, 0.0, 64);
  CHECK(v1.loss == doctest::Approx(v2.loss).epsilon(1e-6));
  CHECK(v1.accuracy == doctest::Approx(v2.accuracy).epsilon(1e-12));
  CHECK(v1.loss == doctest::Approx(ra.history[4].loss).epsilon(1e-6));
}

TEST_CASE("max_steps stops training") {
  TrainConfig cfg = small_train(3);
  cfg.max_steps = 5;
  Model m(tiny_config(), 26);
  const TrainResult r = train(m, small_corpus(), cfg);
  CHECK(r.steps.size() == 5);
  CHECK(m.params().step == 5);
}

TEST_CASE("resuming from a checkpoint matches an uninterrupted run") {
  const auto dir = std::filesystem::temp_directory_path() / "srforge_test_train";
  std::filesystem::remove_all(dir);
  const CorpusSplit& corpus = small_corpus();
  Model straight(tiny_config(), 27);
  train(straight, corpus, small_train(2));

  TrainConfig first = small_train(1);
  first.out_dir = dir;
  Model part(tiny_config(), 27);
  train(part, corpus, first);
  REQUIRE(std::filesystem::exists(dir / "checkpoint.bin"));
  const std::unique_ptr<Model> resumed = load_checkpoint(dir / "checkpoint.bin");
  TrainConfig second = small_train(2);
  second.out_dir = dir;
  const TrainResult r = train(*resumed, corpus, second);
  REQUIRE(r.history.size() == 3);
  CHECK(r.history.front().epoch == 2);
  for (const Parameter& p : straight.params().parameters()) CHECK(resumed->params().at(p.name).value == p.value);

  std::ifstream in(dir / "metrics.csv");
  std::stringstream text;
  text << in.rdbuf();
  const std::string csv = text.str();
  CHECK(csv.rfind("epoch,split,loss,accuracy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv.find("\n2,test,") != std::string::npos);

  // Training past the configured last epoch is a no-op.
  CHECK(train(*resumed, corpus, second).steps.empty());
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace srforge
