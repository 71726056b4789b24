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

#include "srforge/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "srforge/infix.hpp"
#include "srforge/parallel.hpp"
#include "srforge/rng.hpp"
#include "srforge/simplify.hpp"
#include "srforge/treedist.hpp"

namespace srforge {
namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(const std::string& field, std::size_t row, std::size_t col) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) throw ProblemParseError(row, col, "not a number: '" + field + "'");
  return v;
}

double median_abs(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double power_of_ten_scale(double magnitude_log10) { return std::pow(10.0, std::round(magnitude_log10)); }

}  // namespace

ProblemParseError::ProblemParseError(std::size_t row, std::size_t column, const std::string& what)
    : std::runtime_error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
      row_(row),
      column_(column) {}

SrsdProblem load_table(const std::filesystem::path& data_path, const LoadOptions& options) {
  SrsdProblem p;
  p.name = data_path.stem().string();

  std::istringstream in(read_text(data_path));
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string field;
    while (fields >> field) values.push_back(parse_number(field, row, values.size() + 1));
    if (width == 0) {
      if (values.size() < 2) throw ProblemParseError(row, values.size(), "need at least one variable and a target");
      width = values.size();
    } else if (values.size() != width) {
      throw ProblemParseError(row, std::min(values.size(), width) + 1,
                              "expected " + std::to_string(width) + " columns, found " + std::to_string(values.size()));
    }
    ++p.total_rows;
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) continue;
    const int t = options.target_column < 0 ? static_cast<int>(width) + options.target_column : options.target_column;
    if (t < 0 || t >= static_cast<int>(width)) throw ProblemParseError(row, 0, "target column out of range");
    std::vector<double> ordered;
    ordered.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
      if (static_cast<int>(c) != t) ordered.push_back(values[c]);
    }
    ordered.push_back(values[static_cast<std::size_t>(t)]);
    p.rows.push_back(std::move(ordered));
  }
  if (width == 0) throw ProblemParseError(row, 0, "table has no rows");
  p.k = width - 1;
  p.unsupported_arity = p.k > kNumVariables;
  return p;
}

SrsdProblem load_problem(const std::filesystem::path& data_path, const std::filesystem::path& truth_path,
                         std::string group, const LoadOptions& options) {
  SrsdProblem p = load_table(data_path, options);
  p.group = std::move(group);
  const std::string truth_text = read_text(truth_path);
  const auto end = truth_text.find_first_of("\r\n");
  try {
    p.truth = parse_expression(truth_text.substr(0, end));
  } catch (const std::exception&) {
    if (!p.unsupported_arity) throw;
  }
  return p;
}

std::vector<SrsdProblem> load_problem_set(const std::filesystem::path& root, const LoadOptions& options) {
  if (!std::filesystem::is_directory(root)) throw std::runtime_error("not a directory: " + root.string());
  std::vector<std::filesystem::path> groups;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (e.is_directory()) groups.push_back(e.path());
  }
  std::sort(groups.begin(), groups.end());
  std::vector<SrsdProblem> problems;
  for (const auto& g : groups) {
    std::vector<std::filesystem::path> tables;
    for (const auto& e : std::filesystem::directory_iterator(g)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") tables.push_back(e.path());
    }
    std::sort(tables.begin(), tables.end());
    for (const auto& t : tables) {
      auto truth = t;
      truth.replace_extension(".truth");
      if (!std::filesystem::exists(truth)) continue;
      problems.push_back(load_problem(t, truth, g.filename().string(), options));
    }
  }
  return problems;
}

PreparedProblem preprocess(const SrsdProblem& problem) {
  PreparedProblem out;
  out.name = problem.name;
  out.group = problem.group;
  out.k = problem.k;
  out.unsupported_arity = problem.unsupported_arity;
  if (problem.truth) {
    out.truth = simplify(ExprTree::binary(Token::kMul, ExprTree::leaf(Token::kConst), *problem.truth));
  }
  if (problem.rows.empty()) {
    out.usable = false;
    out.reason = "no valid rows";
    return out;
  }
  const std::size_t k = problem.k;
  out.variable_scales.assign(k, 1.0);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> col;
    col.reserve(problem.rows.size());
    for (const auto& r : problem.rows) col.push_back(r[c]);
    const double m = median_abs(std::move(col));
    if (m > 0.0) out.variable_scales[c] = power_of_ten_scale(std::log10(m));
  }
  double log_sum = 0.0;
  std::size_t nonzero = 0;
  for (const auto& r : problem.rows) {
    if (r[k] != 0.0) {
      log_sum += std::log10(std::abs(r[k]));
      ++nonzero;
    }
  }
  if (nonzero == 0) {
    out.usable = false;
    out.reason = "target is zero everywhere";
    return out;
  }
  out.target_scale = power_of_ten_scale(log_sum / static_cast<double>(nonzero));
  if (out.unsupported_arity) return out;
  out.rows.reserve(problem.rows.size());
  for (const auto& r : problem.rows) {
    std::array<float, 7> cells{};
    cells[0] = static_cast<float>(r[k] / out.target_scale);
    for (std::size_t c = 0; c < k; ++c) cells[c + 1] = static_cast<float>(r[c] / out.variable_scales[c]);
    if (std::all_of(cells.begin(), cells.end(), [](float v) { return std::isfinite(v); })) out.rows.push_back(cells);
  }
  return out;
}

std::vector<DecodeOutcome> Predictor::predict_batch(std::span<const PredictRequest> requests) {
  std::vector<DecodeOutcome> out;
  out.reserve(requests.size());
  for (const auto& r : requests) out.push_back(predict(r));
  return out;
}

DecodeOutcome OraclePredictor::predict(const PredictRequest& request) {
  if (!request.truth) throw std::invalid_argument("oracle predictor needs the truth");
  return {preorder_serialize(*request.truth), true};
}

DecodeOutcome ConstantPredictor::predict(const PredictRequest&) {
  return {tokens_, prefix_status(tokens_) == PrefixStatus::kComplete};
}

ProblemResult run_protocol(Predictor& predictor, const PreparedProblem& problem, const EvalProtocolConfig& cfg) {
  ProblemResult res;
  res.name = problem.name;
  res.group = problem.group;
  res.unsupported_arity = problem.unsupported_arity;
  if (cfg.repeats == 0 || cfg.n_obs == 0) throw std::invalid_argument("repeats and n_obs must be positive");
  if (!problem.usable) {
    res.excluded = true;
    res.reason = problem.reason;
    return res;
  }
  if (problem.unsupported_arity || !problem.truth) {
    res.repeat_scores.assign(cfg.repeats, 1.0);
    res.mean_nted = 1.0;
    res.reason = "more than 6 variables";
    return res;
  }
  if (problem.rows.size() < cfg.n_obs) {
    res.excluded = true;
    res.reason = "only " + std::to_string(problem.rows.size()) + " valid rows";
    return res;
  }

  std::vector<std::vector<float>> tables(cfg.repeats);
  std::vector<std::size_t> index(problem.rows.size());
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    Rng rng(derive_seed(cfg.seed, hash_name(problem.name), r));
    std::iota(index.begin(), index.end(), std::size_t{0});
    for (std::size_t i = 0; i < cfg.n_obs; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, index.size() - 1);
      std::swap(index[i], index[pick(rng)]);
    }
    tables[r].reserve(cfg.n_obs * 7);
    for (std::size_t i = 0; i < cfg.n_obs; ++i) {
      const auto& cells = problem.rows[index[i]];
      tables[r].insert(tables[r].end(), cells.begin(), cells.end());
    }
  }
  std::vector<PredictRequest> requests;
  for (const auto& t : tables) requests.push_back({t, cfg.n_obs, &*problem.truth});
  const std::vector<DecodeOutcome> outcomes = predictor.predict_batch(requests);
  if (outcomes.size() != requests.size()) throw std::logic_error("predictor returned the wrong number of outcomes");

  for (const auto& o : outcomes) {
    double score = 1.0;
    if (!o.complete) {
      ++res.incomplete_decodes;
    } else {
      try {
        score = normalized_ted(simplify(preorder_parse(o.tokens)), *problem.truth);
      } catch (const SequenceParseError&) {
        ++res.incomplete_decodes;
      }
    }
    res.repeat_scores.push_back(score);
  }
  res.mean_nted = std::accumulate(res.repeat_scores.begin(), res.repeat_scores.end(), 0.0) /
                  static_cast<double>(res.repeat_scores.size());
  return res;
}

EvalReport aggregate(std::vector<ProblemResult> results) {
  EvalReport report;
  std::sort(results.begin(), results.end(), [](const ProblemResult& a, const ProblemResult& b) {
    return std::tie(a.group, a.name) < std::tie(b.group, b.name);
  });
  std::map<std::string, std::pair<double, std::size_t>> sums;
  std::map<std::string, std::size_t> excluded;
  for (const auto& r : results) {
    if (r.excluded) {
      ++excluded[r.group];
      report.warnings.push_back("excluded " + r.group + "/" + r.name + ": " + r.reason);
      continue;
    }
    auto& [sum, n] = sums[r.group];
    sum += r.mean_nted;
    ++n;
  }
  for (const auto& [group, count] : excluded) {
    if (!sums.count(group)) report.warnings.push_back("group " + group + " has no scored problem; omitted");
  }
  for (const auto& [group, sn] : sums) {
    GroupSummary s;
    s.mean_nted = sn.first / static_cast<double>(sn.second);
    s.problems = sn.second;
    s.excluded = excluded.count(group) ? excluded[group] : 0;
    report.groups[group] = s;
  }
  report.problems = std::move(results);
  return report;
}

EvalReport evaluate_problems(Predictor& predictor, const std::vector<SrsdProblem>& problems,
                             const EvalProtocolConfig& cfg) {
  std::vector<ProblemResult> results(problems.size());
  ParallelErrors errors;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < problems.size(); ++i) {
    errors.run([&] { results[i] = run_protocol(predictor, preprocess(problems[i]), cfg); });
  }
  errors.rethrow();
  return aggregate(std::move(results));
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["problems"] = nlohmann::ordered_json::array();
  for (const auto& p : report.problems) {
    j["problems"].push_back({{"name", p.name},
                             {"group", p.group},
                             {"mean_nted", p.mean_nted},
                             {"flags",
                              {{"unsupported_arity", p.unsupported_arity},
                               {"incomplete_decodes", p.incomplete_decodes},
                               {"excluded", p.excluded},
                               {"reason", p.reason}}}});
  }
  j["groups"] = nlohmann::ordered_json::object();
  for (const auto& [name, g] : report.groups) {
    j["groups"][name] = {{"mean_nted", g.mean_nted}, {"problems", g.problems}, {"excluded", g.excluded}};
  }
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(9);
  out << "name,group,mean_nted,unsupported_arity,incomplete_decodes,excluded\n";
  for (const auto& p : report.problems) {
    out << p.name << ',' << p.group << ',' << p.mean_nted << ',' << (p.unsupported_arity ? 1 : 0) << ','
        << p.incomplete_decodes << ',' << (p.excluded ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace srforge
