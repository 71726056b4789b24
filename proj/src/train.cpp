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

#include "srforge/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "srforge/checkpoint.hpp"
#include "srforge/ops.hpp"

namespace srforge {
inline namespace SRFORGE_PRECISION {
namespace {

std::vector<const TabularDataset*> gather(const std::vector<TabularDataset>& datasets,
                                          std::span<const std::size_t> indices) {
  std::vector<const TabularDataset*> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(&datasets.at(i));
  return out;
}

struct Forward {
  Var loss;
  Var logits;
};

Forward forward(Graph& g, Model& model, const Batch& b, double eps) {
  const Var memory = model.encode(g, b.tables);
  const Var logits = model.decode(g, memory, b.decoder_input, b.batch, b.len);
  return {cross_entropy(g, logits, b.targets, b.keep, static_cast<real>(eps)), logits};
}

std::size_t kept_count(const Batch& b) {
  return static_cast<std::size_t>(std::count(b.keep.begin(), b.keep.end(), std::uint8_t{1}));
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

Batch make_batch(std::span<const TabularDataset* const> datasets, const ModelConfig& cfg) {
  if (datasets.empty()) throw std::invalid_argument("empty batch");
  Batch b;
  b.batch = datasets.size();
  b.len = cfg.max_len - 1;
  b.tables = Tensor({b.batch, cfg.n_rows, cfg.d_cols});
  b.decoder_input.assign(b.batch * b.len, token_id(Token::kPad));
  b.targets.assign(b.batch * b.len, token_id(Token::kPad));
  b.keep.assign(b.batch * b.len, 0);
  const std::size_t cells = cfg.n_rows * cfg.d_cols;
  for (std::size_t i = 0; i < b.batch; ++i) {
    const TabularDataset& d = *datasets[i];
    if (d.n_rows != cfg.n_rows || d.values.size() != cells || cfg.d_cols != kTableCols) {
      throw std::invalid_argument("dataset table does not match the model input shape");
    }
    if (d.ground_truth.size() > b.len) {
      throw std::invalid_argument("ground truth of " + std::to_string(d.ground_truth.size()) +
                                  " tokens exceeds the decoder length");
    }
    std::copy(d.values.begin(), d.values.end(), b.tables.data().begin() + static_cast<std::ptrdiff_t>(i * cells));
    int* in = b.decoder_input.data() + i * b.len;
    int* tg = b.targets.data() + i * b.len;
    std::uint8_t* keep = b.keep.data() + i * b.len;
    in[0] = token_id(Token::kSos);
    for (std::size_t k = 0; k < d.ground_truth.size(); ++k) {
      const int id = token_id(d.ground_truth[k]);
      if (k + 1 < b.len) in[k + 1] = id;
      tg[k] = id;
      keep[k] = 1;
    }
  }
  return b;
}

StepStats train_step(Model& model, const Batch& batch, double label_smoothing, const ScheduleConfig& schedule,
                     std::uint64_t dropout_seed) {
  ParameterStore& store = model.params();
  Graph g(true, true, dropout_seed);
  const Forward f = forward(g, model, batch, label_smoothing);
  StepStats s;
  s.loss = static_cast<double>(g.value(f.loss)[0]);
  if (!std::isfinite(s.loss)) {
    throw NumericError("non-finite training loss at step " + std::to_string(store.step + 1));
  }
  s.accuracy = token_accuracy(g.value(f.logits).data(), model.config().vocab, batch.targets, batch.keep);
  store.zero_grad();
  g.backward(f.loss);
  if (!gradients_finite(store)) {
    throw NumericError("non-finite gradient at step " + std::to_string(store.step + 1));
  }
  s.lr = noam_lr(store.step + 1, schedule);
  adam_step(store, s.lr);
  s.step = store.step;
  return s;
}

SplitMetrics evaluate_split(Model& model, const std::vector<TabularDataset>& datasets,
                            std::span<const std::size_t> indices, double label_smoothing,
                            std::size_t batch_size) {
  if (indices.empty()) throw std::invalid_argument("cannot evaluate an empty split");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  double loss = 0.0;
  double hits = 0.0;
  std::size_t kept = 0;
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const auto chunk = indices.subspan(start, std::min(batch_size, indices.size() - start));
    const auto ptrs = gather(datasets, chunk);
    const Batch b = make_batch(ptrs, model.config());
    Graph g(false, false);
    const Forward f = forward(g, model, b, label_smoothing);
    const std::size_t k = kept_count(b);
    loss += static_cast<double>(g.value(f.loss)[0]) * static_cast<double>(k);
    hits += token_accuracy(g.value(f.logits).data(), model.config().vocab, b.targets, b.keep) *
            static_cast<double>(k);
    kept += k;
  }
  return {loss / static_cast<double>(kept), hits / static_cast<double>(kept)};
}

TrainResult train(Model& model, const CorpusSplit& corpus, const TrainConfig& cfg,
                  const std::function<void(const StepStats&)>& on_step) {
  cfg.validate();
  if (corpus.train.empty()) throw std::invalid_argument("the training split is empty");
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
  const ScheduleConfig schedule{model.config().d_model, cfg.warmup_steps, cfg.lr_scale};
  const std::size_t per_epoch = (corpus.train.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t first_epoch = static_cast<std::size_t>(model.params().step / per_epoch);

  const auto metrics_path = cfg.out_dir / "metrics.csv";
  if (!cfg.out_dir.empty() && (first_epoch == 0 || !std::filesystem::exists(metrics_path))) {
    write_text(metrics_path, metrics_csv({}));
  }

  TrainResult result;
  std::vector<std::size_t> order = corpus.train;
  bool stop = false;
  for (std::size_t epoch = first_epoch + 1; epoch <= cfg.epochs && !stop; ++epoch) {
    std::sort(order.begin(), order.end());
    Rng shuffle(derive_seed(cfg.seed, hash_name("shuffle"), epoch));
    std::shuffle(order.begin(), order.end(), shuffle);

    double loss_sum = 0.0;
    double acc_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      if (cfg.max_steps && model.params().step >= cfg.max_steps) {
        stop = true;
        break;
      }
      const auto chunk = std::span<const std::size_t>(order).subspan(
          start, std::min(cfg.batch_size, order.size() - start));
      const auto ptrs = gather(corpus.datasets, chunk);
      const Batch b = make_batch(ptrs, model.config());
      const StepStats s = train_step(model, b, cfg.label_smoothing, schedule,
                                     derive_seed(cfg.seed, hash_name("dropout"), model.params().step));
      loss_sum += s.loss;
      acc_sum += s.accuracy;
      ++steps;
      result.steps.push_back(s);
      if (on_step) on_step(s);
    }
    if (steps == 0) break;
    const std::size_t recorded = result.history.size();
    result.history.push_back({epoch, "train", loss_sum / static_cast<double>(steps),
                              acc_sum / static_cast<double>(steps)});
    if (cfg.eval_splits) {
      for (const auto& [name, idx] : {std::pair<std::string, const std::vector<std::size_t>*>{"validation", &corpus.validation},
                                      {"test", &corpus.test}}) {
        if (idx->empty()) continue;
        const SplitMetrics m = evaluate_split(model, corpus.datasets, *idx, cfg.label_smoothing, cfg.eval_batch);
        result.history.push_back({epoch, name, m.loss, m.accuracy});
      }
    }
    if (!cfg.out_dir.empty()) {
      std::string rows = metrics_csv({result.history.begin() + static_cast<std::ptrdiff_t>(recorded),
                                      result.history.end()});
      rows.erase(0, rows.find('\n') + 1);
      std::ofstream(metrics_path, std::ios::app) << rows;
      const bool last = epoch == cfg.epochs || stop || (cfg.max_steps && model.params().step >= cfg.max_steps);
      if (last || (cfg.checkpoint_every && epoch % cfg.checkpoint_every == 0)) {
        save_checkpoint(cfg.out_dir / "checkpoint.bin", model, true);
      }
    }
  }
  return result;
}

}  // namespace SRFORGE_PRECISION
}  // namespace srforge
