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
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "srforge/evalbench.hpp"
#include "srforge/infix.hpp"
#include "srforge/rng.hpp"
#include "srforge/simplify.hpp"
#include "test_support.hpp"

namespace srforge {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

// k variables drawn around `magnitude`, target y = f(x).
void write_problem(const fs::path& dir, const std::string& name, std::size_t k, std::size_t rows,
                   const std::string& truth, double (*f)(const std::vector<double>&), double magnitude = 1.0) {
  Rng rng(hash_name(name));
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::ostringstream table;
  table << "# synthetic\n";
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<double> x(k);
    for (double& v : x) v = u(rng) * magnitude;
    for (double v : x) table << v << ' ';
    table << f(x) << '\n';
  }
  write_file(dir / (name + ".txt"), table.str());
  write_file(dir / (name + ".truth"), truth + "\n");
}

double first_var(const std::vector<double>& x) { return x[0]; }
double product(const std::vector<double>& x) { return 3.0 * x[0] * x[1]; }
double sum_all(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}
double zero(const std::vector<double>&) { return 0.0; }

TEST_CASE("loading a problem") {
  TempDir tmp("srforge_eval_load");
  write_file(tmp.path() / "p.txt", "# x1 x2 y\n1 2 3\n\n4 5 6\n7 inf 9\n1e3 -2.5e-1 nan\n");
  write_file(tmp.path() / "p.truth", "C*x1 + log(x2)\n");
  const SrsdProblem p = load_problem(tmp.path() / "p.txt", tmp.path() / "p.truth", "easy");
  CHECK(p.name == "p");
  CHECK(p.group == "easy");
  CHECK(p.k == 2);
  CHECK(p.total_rows == 4);
  REQUIRE(p.rows.size() == 2);
  CHECK(p.rows[1] == std::vector<double>{4, 5, 6});
  REQUIRE(p.truth);
  CHECK(*p.truth == testing::tree("add mul C x1 log x2"));

  LoadOptions first;
  first.target_column = 0;
  const SrsdProblem q = load_problem(tmp.path() / "p.txt", tmp.path() / "p.truth", "easy", first);
  CHECK(q.rows[0] == std::vector<double>{2, 3, 1});

  write_file(tmp.path() / "bad.txt", "1 2 3\n4 5\n");
  try {
    load_problem(tmp.path() / "bad.txt", tmp.path() / "p.truth", "easy");
    FAIL("expected a parse error");
  } catch (const ProblemParseError& e) {
    CHECK(e.row() == 2);
  }
  write_file(tmp.path() / "word.txt", "1 2 3\n4 five 6\n");
  try {
    load_problem(tmp.path() / "word.txt", tmp.path() / "p.truth", "easy");
    FAIL("expected a parse error");
  } catch (const ProblemParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == 2);
  }
  write_file(tmp.path() / "token.truth", "add x1 x2\n");
  CHECK(*load_problem(tmp.path() / "p.txt", tmp.path() / "token.truth", "easy").truth == testing::tree("add x1 x2"));

  write_file(tmp.path() / "wide.txt", "1 2 3 4 5 6 7 8\n");
  write_file(tmp.path() / "wide.truth", "x1 + x7\n");
  const SrsdProblem wide = load_problem(tmp.path() / "wide.txt", tmp.path() / "wide.truth", "hard");
  CHECK(wide.k == 7);
  CHECK(wide.unsupported_arity);
  CHECK_FALSE(wide.truth);
  CHECK_THROWS(load_problem(tmp.path() / "p.txt", tmp.path() / "wide.truth", "easy"));
}

TEST_CASE("preprocessing") {
  SrsdProblem p;
  p.name = "scaled";
  p.group = "easy";
  p.k = 2;
  p.truth = testing::tree("mul x1 x2");
  for (int i = 0; i < 5; ++i) p.rows.push_back({3e4 + i, 1.0 + 0.1 * i, 500.0});
  p.rows.push_back({3e4, 0.0, 0.0});
  const PreparedProblem q = preprocess(p);
  CHECK(q.usable);
  CHECK(q.variable_scales[0] == 1e4);
  CHECK(q.variable_scales[1] == 1.0);
  CHECK(q.rows[0][1] == doctest::Approx(3.0));
  CHECK(q.rows[0][2] == doctest::Approx(1.0));
  CHECK(q.target_scale == 1e3);
  CHECK(q.rows[0][0] == doctest::Approx(0.5));
  CHECK(q.rows[0][3] == 0.0f);
  CHECK(*q.truth == simplify(testing::tree("mul C mul x1 x2")));

  SrsdProblem flat = p;
  for (auto& r : flat.rows) r[2] = 0.0;
  const PreparedProblem f = preprocess(flat);
  CHECK_FALSE(f.usable);
  CHECK_FALSE(f.reason.empty());

  SrsdProblem zero_col = p;
  for (auto& r : zero_col.rows) r[1] = 0.0;
  CHECK(preprocess(zero_col).variable_scales[1] == 1.0);
}

TEST_CASE("median of an even count") {
  SrsdProblem p;
  p.k = 1;
  p.truth = testing::tree("x1");
  p.rows = {{10, 1}, {20, 1}, {30, 1}, {1e6, 1}};
  // median 25 -> log10 1.398 -> scale 10
  CHECK(preprocess(p).variable_scales[0] == 10.0);
}

TEST_CASE("oracle and constant predictors") {
  TempDir tmp("srforge_eval_protocol");
  write_problem(tmp.path() / "easy", "ident", 1, 80, "x1", first_var);
  write_problem(tmp.path() / "easy", "prod", 2, 120, "3*x1*x2", product, 100.0);
  write_problem(tmp.path() / "medium", "few", 2, 30, "x1*x2", product);
  write_problem(tmp.path() / "hard", "wide", 7, 60, "x1+x2+x3+x4+x5+x6+x7", sum_all);
  write_problem(tmp.path() / "hard", "flat", 1, 60, "x1", zero);
  const std::vector<SrsdProblem> problems = load_problem_set(tmp.path());
  REQUIRE(problems.size() == 5);
  CHECK(problems[0].name == "ident");
  CHECK(problems[2].name == "flat");

  EvalProtocolConfig cfg;
  cfg.seed = 4;
  OraclePredictor oracle;
  const EvalReport r = evaluate_problems(oracle, problems, cfg);
  REQUIRE(r.problems.size() == 5);
  for (const ProblemResult& p : r.problems) {
    INFO(p.name);
    if (p.name == "wide") {
      CHECK(p.unsupported_arity);
      CHECK(p.mean_nted == 1.0);
    } else if (p.name == "few" || p.name == "flat") {
      CHECK(p.excluded);
    } else {
      CHECK(p.mean_nted == 0.0);
      CHECK(p.repeat_scores.size() == 30);
    }
  }
  CHECK(r.groups.at("easy").mean_nted == 0.0);
  CHECK(r.groups.at("easy").problems == 2);
  CHECK(r.groups.count("medium") == 0);
  CHECK(r.groups.at("hard").mean_nted == 1.0);
  CHECK(r.groups.at("hard").excluded == 1);
  CHECK(r.warnings.size() == 3);

  std::vector<SrsdProblem> reversed(problems.rbegin(), problems.rend());
  const EvalReport again = evaluate_problems(oracle, reversed, cfg);
  CHECK(report_json(again) == report_json(r));

  // Truth of "ident" is mul(C, x1); one relabel out of three nodes.
  ConstantPredictor near(sequence_from_text("mul C x2"));
  const ProblemResult one = run_protocol(near, preprocess(problems[0]), cfg);
  CHECK(one.mean_nted == doctest::Approx(1.0 / 3.0));
  ConstantPredictor open(sequence_from_text("add x1"));
  const ProblemResult bad = run_protocol(open, preprocess(problems[0]), cfg);
  CHECK(bad.mean_nted == 1.0);
  CHECK(bad.incomplete_decodes == 30);
}

TEST_CASE("constant leaf against a single-leaf truth") {
  PreparedProblem p;
  p.name = "leaf";
  p.group = "easy";
  p.k = 2;
  p.truth = testing::tree("x2");
  for (int i = 0; i < 60; ++i) p.rows.push_back({1, static_cast<float>(i), 2, 0, 0, 0, 0});
  ConstantPredictor leaf(sequence_from_text("x1"));
  CHECK(run_protocol(leaf, p, {}).mean_nted == 1.0);
}

// Records the tables it was asked about.
class RecordingPredictor : public Predictor {
 public:
  DecodeOutcome predict(const PredictRequest& request) override {
    seen.emplace_back(request.table.begin(), request.table.end());
    return {sequence_from_text("x1"), true};
  }
  std::vector<std::vector<float>> seen;
};

TEST_CASE("sampling protocol") {
  PreparedProblem p;
  p.name = "sampled";
  p.group = "easy";
  p.k = 1;
  p.truth = testing::tree("mul C x1");
  for (int i = 0; i < 200; ++i) p.rows.push_back({static_cast<float>(i), static_cast<float>(i), 0, 0, 0, 0, 0});
  EvalProtocolConfig cfg;
  cfg.seed = 11;
  RecordingPredictor a, b, c;
  run_protocol(a, p, cfg);
  run_protocol(b, p, cfg);
  cfg.seed = 12;
  run_protocol(c, p, cfg);
  REQUIRE(a.seen.size() == 30);
  CHECK(a.seen == b.seen);
  CHECK(a.seen != c.seen);
  for (const auto& t : a.seen) {
    CHECK(t.size() == 50 * 7);
    std::set<float> ids;
    for (std::size_t r = 0; r < 50; ++r) ids.insert(t[r * 7]);
    CHECK(ids.size() == 50);
  }
  std::set<std::vector<float>> distinct(a.seen.begin(), a.seen.end());
  CHECK(distinct.size() == 30);
}

TEST_CASE("aggregation") {
  std::vector<ProblemResult> results;
  const double means[] = {0.2, 0.5, 0.9};
  for (int i = 0; i < 3; ++i) {
    ProblemResult r;
    r.name = "p" + std::to_string(i);
    r.group = "medium";
    r.mean_nted = means[i];
    results.push_back(r);
  }
  ProblemResult single;
  single.name = "s";
  single.group = "easy";
  single.mean_nted = 0.25;
  results.push_back(single);
  const EvalReport r = aggregate(results);
  CHECK(r.groups.at("easy").mean_nted == 0.25);
  const double m = r.groups.at("medium").mean_nted;
  CHECK(m == doctest::Approx((0.2 + 0.5 + 0.9) / 3));
  CHECK(m >= 0.2);
  CHECK(m <= 0.9);
  CHECK(r.problems.front().group == "easy");

  const auto json = nlohmann::json::parse(report_json(r));
  CHECK(json["groups"]["medium"]["problems"] == 3);
  CHECK(json["problems"].size() == 4);
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("name,group,mean_nted,unsupported_arity,incomplete_decodes,excluded\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  for (auto& x : results) x.mean_nted = 1.0;
  for (const auto& [g, s] : aggregate(results).groups) CHECK(s.mean_nted == 1.0);
}

}  // namespace
}  // namespace srforge
