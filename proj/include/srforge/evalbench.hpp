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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srforge/expr_tree.hpp"
#include "srforge/model_config.hpp"

namespace srforge {

/// Malformed problem table; the message carries the row and column.
class ProblemParseError : public std::runtime_error {
 public:
  ProblemParseError(std::size_t row, std::size_t column, const std::string& what);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

struct LoadOptions {
  /// Column holding the target; negative counts from the end.
  int target_column = -1;
};

struct SrsdProblem {
  std::string name;
  std::string group;
  std::size_t k = 0;
  /// Finite rows only, each laid out as x1..xk, y.
  std::vector<std::vector<double>> rows;
  std::size_t total_rows = 0;
  /// Absent only when the truth could not be parsed and k > 6.
  std::optional<ExprTree> truth;
  bool unsupported_arity = false;
};

/// The table part of load_problem; the result has no group and no truth.
SrsdProblem load_table(const std::filesystem::path& data_path, const LoadOptions& options = {});

/// Parses a whitespace-delimited numeric table (blank lines and lines
/// starting with '#' are skipped) and the expression in `truth_path`.
/// Rows with a non-finite value are counted but not kept.
SrsdProblem load_problem(const std::filesystem::path& data_path, const std::filesystem::path& truth_path,
                         std::string group, const LoadOptions& options = {});

/// Every `<group>/<name>.txt` with a matching `<name>.truth` under `root`,
/// sorted by group then name.
std::vector<SrsdProblem> load_problem_set(const std::filesystem::path& root, const LoadOptions& options = {});

struct PreparedProblem {
  std::string name;
  std::string group;
  std::size_t k = 0;
  /// Scaled rows as model input: y, x1..xk, zero padding to 7 columns.
  std::vector<std::array<float, 7>> rows;
  std::vector<double> variable_scales;
  double target_scale = 1.0;
  /// mul(C, truth), simplified.
  std::optional<ExprTree> truth;
  bool unsupported_arity = false;
  bool usable = true;
  std::string reason;
};

/// Divides each variable by 10^round(log10(median |x|)) (scale 1 for an
/// all-zero column) and the target by 10^round(mean log10 |y|) over nonzero
/// y. A target that is zero everywhere marks the problem unusable.
PreparedProblem preprocess(const SrsdProblem& problem);

struct PredictRequest {
  /// [rows, 7] row-major: y, x1..x6.
  std::span<const float> table;
  std::size_t rows = 0;
  /// Standardized truth; only oracle predictors may look at it.
  const ExprTree* truth = nullptr;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual DecodeOutcome predict(const PredictRequest& request) = 0;
  /// Defaults to one predict() call per request.
  virtual std::vector<DecodeOutcome> predict_batch(std::span<const PredictRequest> requests);
};

/// Returns the standardized truth.
class OraclePredictor : public Predictor {
 public:
  DecodeOutcome predict(const PredictRequest& request) override;
};

/// Returns the same sequence for every input.
class ConstantPredictor : public Predictor {
 public:
  explicit ConstantPredictor(TokenSequence tokens) : tokens_(std::move(tokens)) {}
  DecodeOutcome predict(const PredictRequest& request) override;

 private:
  TokenSequence tokens_;
};

struct EvalProtocolConfig {
  std::size_t n_obs = 50;
  std::size_t repeats = 30;
  std::uint64_t seed = 0;
};

struct ProblemResult {
  std::string name;
  std::string group;
  double mean_nted = 1.0;
  std::vector<double> repeat_scores;
  bool unsupported_arity = false;
  std::size_t incomplete_decodes = 0;
  /// Excluded from group means (too few valid rows or unusable target).
  bool excluded = false;
  std::string reason;
};

/// Repeat r samples n_obs valid rows without replacement using a seed
/// derived from (cfg.seed, problem name, r), decodes, simplifies the
/// prediction and scores it against the standardized truth. Incomplete
/// decodes and unsupported arity score 1.0.
ProblemResult run_protocol(Predictor& predictor, const PreparedProblem& problem, const EvalProtocolConfig& cfg);

struct GroupSummary {
  double mean_nted = 0.0;
  std::size_t problems = 0;
  std::size_t excluded = 0;
};

struct EvalReport {
  std::vector<ProblemResult> problems;
  std::map<std::string, GroupSummary> groups;
  std::vector<std::string> warnings;
};

/// Unweighted mean of per-problem means within each group, excluded
/// problems left out. Groups with no scored problem are omitted and warned.
EvalReport aggregate(std::vector<ProblemResult> results);

/// Preprocesses and evaluates every problem (in parallel), then aggregates.
EvalReport evaluate_problems(Predictor& predictor, const std::vector<SrsdProblem>& problems,
                             const EvalProtocolConfig& cfg);

std::string report_json(const EvalReport& report);
/// One line per problem: name,group,mean_nted,unsupported_arity,incomplete_decodes,excluded
std::string report_csv(const EvalReport& report);

}  // namespace srforge
