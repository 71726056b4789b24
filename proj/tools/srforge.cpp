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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "run_config.hpp"
#include "srforge/checkpoint.hpp"
#include "srforge/corpus_io.hpp"
#include "srforge/datagen.hpp"
#include "srforge/evalbench.hpp"
#include "srforge/infix.hpp"
#include "srforge/model_predictor.hpp"
#include "srforge/parallel.hpp"
#include "srforge/simplify.hpp"
#include "srforge/train.hpp"
#include "srforge/treedist.hpp"

namespace srforge::cli {
namespace {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct Command {
  std::string name;
  std::string help;
  RunConfig config;
  std::function<void(const RunConfig&)> run;
};

std::string with_commas(std::size_t n) {
  std::string s = std::to_string(n);
  for (int i = static_cast<int>(s.size()) - 3; i > 0; i -= 3) s.insert(static_cast<std::size_t>(i), ",");
  return s;
}

const std::string& required(const RunConfig& c, std::string_view key) {
  const std::string& v = c.get(key);
  if (v.empty()) throw ConfigError("missing required setting '" + std::string(key) + "'");
  return v;
}

std::size_t positive(const RunConfig& c, std::string_view key) {
  const std::int64_t v = c.get_int(key);
  if (v < 1) throw ConfigError("'" + std::string(key) + "' must be at least 1");
  return static_cast<std::size_t>(v);
}

void write_run_cfg(const fs::path& dir, const RunConfig& c, std::string_view command) {
  fs::create_directories(dir);
  std::ofstream out(dir / "run.cfg", std::ios::trunc);
  out << "# srforge " << command << "\n" << c.dump();
}

void apply_threads(const RunConfig& c) { set_thread_count(static_cast<int>(positive(c, "threads"))); }

// ---------------------------------------------------------------- generate

Command generate_command() {
  Command cmd{"generate", "Sample skeletons and realize a tabular corpus", {}, {}};
  RunConfig& c = cmd.config;
  const GenerationConfig d;
  c.declare("out", "", "output corpus directory");
  c.declare("seed", "0", "master seed");
  c.declare("n_raw", "100000", "raw skeleton samples");
  c.declare("n_realizations", "10", "datasets realized per unique skeleton");
  c.declare("node_budget", std::to_string(d.node_budget), "maximum prefix length of a sampled tree");
  c.declare("max_tokens", std::to_string(d.max_tokens), "maximum skeleton length after simplification");
  c.declare("const_min", "-100", "lower bound for constants");
  c.declare("const_max", "100", "upper bound for constants");
  c.declare("var_min", "0.1", "lower bound for variable values");
  c.declare("var_max", "10", "upper bound for variable values");
  c.declare("y_cap", "1e9", "largest accepted |y|");
  cmd.run = [](const RunConfig& c) {
    apply_threads(c);
    const fs::path out = required(c, "out");
    GenerationConfig g;
    g.seed = c.get_u64("seed");
    g.n_raw_samples = positive(c, "n_raw");
    g.n_realizations = positive(c, "n_realizations");
    g.node_budget = positive(c, "node_budget");
    g.max_tokens = positive(c, "max_tokens");
    g.const_min = c.get_double("const_min");
    g.const_max = c.get_double("const_max");
    g.var_min = c.get_double("var_min");
    g.var_max = c.get_double("var_max");
    g.y_cap = c.get_double("y_cap");
    g.validate();
    write_run_cfg(out, c, "generate");
    const SkeletonBank bank = build_skeleton_bank(g);
    const CorpusSplit corpus = build_corpus(bank.skeletons, g);
    write_corpus(corpus, out);
    std::cout << "raw " << bank.stats.raw << "\n"
              << "valid " << bank.stats.valid << "\n"
              << "unique " << bank.stats.unique << "\n"
              << "realized " << corpus.stats.realized << "\n"
              << "rejected_domain " << corpus.stats.rejected_domain << "\n"
              << "rejected_magnitude " << corpus.stats.rejected_magnitude << "\n"
              << "split " << corpus.train.size() << "/" << corpus.validation.size() << "/" << corpus.test.size()
              << "\n";
  };
  return cmd;
}

// ---------------------------------------------------------------- train

const char* const kModelKeys[] = {"d_model", "n_enc", "n_dec", "heads", "p_drop"};

Command train_command() {
  Command cmd{"train", "Train a model on a generated corpus", {}, {}};
  RunConfig& c = cmd.config;
  c.declare("corpus", "", "corpus directory written by generate");
  c.declare("out", "", "output directory for checkpoint.bin and metrics.csv");
  c.declare("profile", "desk", "size profile: desk or paper");
  c.declare("encoder", "mlp", "encoder kind: mlp, att or mix");
  c.declare("label_smoothing", "0", "label smoothing epsilon");
  c.declare("seed", "0", "master seed (initialization, shuffling, dropout)");
  c.declare("epochs", "", "last epoch to train (default from profile)");
  c.declare("batch_size", "", "batch size (default from profile)");
  c.declare("d_model", "", "model width (default from profile)");
  c.declare("n_enc", "", "encoder layers (default from profile)");
  c.declare("n_dec", "", "decoder layers (default from profile)");
  c.declare("heads", "", "attention heads (default from profile)");
  c.declare("p_drop", "", "dropout rate (default from profile)");
  c.declare("warmup", "4000", "learning-rate warmup steps");
  c.declare("lr_scale", "1", "multiplier on the learning-rate schedule");
  c.declare("max_steps", "0", "stop after this many optimizer steps (0: no limit)");
  c.declare("checkpoint_every", "1", "epochs between checkpoints (0: final only)");
  c.declare("log_every", "100", "steps between progress lines (0: silent)");
  c.declare("resume", "false", "continue from out/checkpoint.bin", true);
  cmd.run = [](const RunConfig& c) {
    apply_threads(c);
    const fs::path corpus_dir = required(c, "corpus");
    const fs::path out = required(c, "out");
    const std::string& profile_name = c.get("profile");
    TrainProfile profile;
    if (profile_name == "desk") {
      profile = desk_profile();
    } else if (profile_name == "paper") {
      profile = paper_profile();
    } else {
      throw ConfigError("unknown profile '" + profile_name + "' (expected desk or paper)");
    }
    const auto kind = encoder_kind_from_name(c.get("encoder"));
    if (!kind) throw ConfigError("unknown encoder '" + c.get("encoder") + "' (expected mlp, att or mix)");

    RunConfig resolved = c;
    ModelConfig& m = profile.model;
    m.encoder = *kind;
    if (!c.get("d_model").empty()) m.d_model = positive(c, "d_model");
    if (!c.get("n_enc").empty()) m.n_enc = positive(c, "n_enc");
    if (!c.get("n_dec").empty()) m.n_dec = positive(c, "n_dec");
    if (!c.get("heads").empty()) m.heads = positive(c, "heads");
    if (!c.get("p_drop").empty()) m.p_drop = c.get_double("p_drop");
    TrainConfig& t = profile.train;
    if (!c.get("epochs").empty()) t.epochs = positive(c, "epochs");
    if (!c.get("batch_size").empty()) t.batch_size = positive(c, "batch_size");
    t.label_smoothing = c.get_double("label_smoothing");
    if (!(t.label_smoothing >= 0.0 && t.label_smoothing < 1.0)) {
      throw ConfigError("label_smoothing must lie in [0, 1)");
    }
    t.seed = c.get_u64("seed");
    t.warmup_steps = c.get_u64("warmup");
    t.lr_scale = c.get_double("lr_scale");
    t.max_steps = c.get_u64("max_steps");
    t.checkpoint_every = static_cast<std::size_t>(c.get_u64("checkpoint_every"));
    t.out_dir = out;
    t.validate();

    const CorpusSplit corpus = read_corpus(corpus_dir);
    if (corpus.datasets.empty()) throw CorpusFormatError("corpus has no datasets");
    m.n_rows = corpus.datasets.front().n_rows;

    std::unique_ptr<Model> model;
    if (c.get_bool("resume")) {
      const fs::path ckpt = out / "checkpoint.bin";
      if (!fs::exists(ckpt)) throw CheckpointError("nothing to resume: " + ckpt.string() + " does not exist");
      model = load_checkpoint(ckpt);
      m = model->config();
      std::cerr << "resuming at step " << model->params().step << "\n";
    } else {
      m.validate();
      model = std::make_unique<Model>(m, derive_seed(t.seed, hash_name("init")));
    }
    resolved.set("encoder", std::string(encoder_kind_name(m.encoder)));
    resolved.set("d_model", std::to_string(m.d_model));
    resolved.set("n_enc", std::to_string(m.n_enc));
    resolved.set("n_dec", std::to_string(m.n_dec));
    resolved.set("heads", std::to_string(m.heads));
    std::ostringstream p;
    p << m.p_drop;
    resolved.set("p_drop", p.str());
    resolved.set("epochs", std::to_string(t.epochs));
    resolved.set("batch_size", std::to_string(t.batch_size));
    write_run_cfg(out, resolved, "train");

    std::cerr << "parameters " << with_commas(model->params().total_count()) << ", train "
              << corpus.train.size() << " datasets\n";
    const std::uint64_t log_every = c.get_u64("log_every");
    const auto on_step = [log_every](const StepStats& s) {
      if (log_every && s.step % log_every == 0) {
        std::cerr << "step " << s.step << " lr " << s.lr << " loss " << s.loss << " acc " << s.accuracy << "\n";
      }
    };
    const TrainResult r = train(*model, corpus, t, on_step);
    std::cout << std::fixed << std::setprecision(4);
    for (const MetricsRecord& rec : r.history) {
      std::cout << "epoch " << rec.epoch << " " << rec.split << " loss " << rec.loss << " accuracy " << rec.accuracy
                << "\n";
    }
    std::cout << "steps " << model->params().step << "\n";
  };
  return cmd;
}

// ---------------------------------------------------------------- predict

Command predict_command() {
  Command cmd{"predict", "Decode an expression for one data table", {}, {}};
  RunConfig& c = cmd.config;
  c.declare("checkpoint", "", "model checkpoint");
  c.declare("input", "", "whitespace-delimited table: x1 .. xk y");
  c.declare("target_column", "-1", "column holding y (negative counts from the end)");
  c.declare("beam", "1", "beam width (only greedy decoding, width 1, is implemented)");
  cmd.run = [](const RunConfig& c) {
    apply_threads(c);
    if (c.get_int("beam") != 1) throw ConfigError("beam widths other than 1 are not supported");
    std::unique_ptr<Model> model = load_checkpoint(required(c, "checkpoint"));
    LoadOptions opt;
    opt.target_column = static_cast<int>(c.get_int("target_column"));
    const SrsdProblem table = load_table(required(c, "input"), opt);
    if (table.unsupported_arity) {
      throw ProblemParseError(0, table.k + 1, "table has " + std::to_string(table.k) + " variables; at most 6 are supported");
    }
    const PreparedProblem prepared = preprocess(table);
    if (!prepared.usable) throw ProblemParseError(0, 0, prepared.reason);
    const std::size_t n = model->config().n_rows;
    if (prepared.rows.size() < n) {
      throw ProblemParseError(0, 0, "need " + std::to_string(n) + " valid rows, found " +
                                        std::to_string(prepared.rows.size()));
    }
    Tensor input({n, 7});
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < 7; ++j) input[r * 7 + j] = static_cast<real>(prepared.rows[r][j]);
    }
    std::cerr << "target scale " << prepared.target_scale << ", variable scales";
    for (double s : prepared.variable_scales) std::cerr << " " << s;
    std::cerr << "\n";
    const TokenSequence tokens = model->greedy_decode(input);
    std::cout << to_text(tokens) << "\n" << print_infix(preorder_parse(tokens)) << "\n";
  };
  return cmd;
}

// ---------------------------------------------------------------- evaluate

Command evaluate_command() {
  Command cmd{"evaluate", "Score a model on a directory of benchmark problems", {}, {}};
  RunConfig& c = cmd.config;
  c.declare("problems", "", "directory with one subdirectory per group");
  c.declare("out", "", "directory for report.json and report.csv");
  c.declare("checkpoint", "", "model checkpoint (not needed with --oracle)");
  c.declare("oracle", "false", "predict the standardized truth instead of running a model", true);
  c.declare("seed", "0", "sampling seed");
  c.declare("n_obs", "50", "observations per repeat");
  c.declare("repeats", "30", "sampling repeats per problem");
  c.declare("target_column", "-1", "column holding y (negative counts from the end)");
  cmd.run = [](const RunConfig& c) {
    apply_threads(c);
    const fs::path out = required(c, "out");
    EvalProtocolConfig cfg;
    cfg.seed = c.get_u64("seed");
    cfg.n_obs = positive(c, "n_obs");
    cfg.repeats = positive(c, "repeats");
    LoadOptions opt;
    opt.target_column = static_cast<int>(c.get_int("target_column"));

    std::unique_ptr<Model> model;
    std::unique_ptr<Predictor> predictor;
    if (c.get_bool("oracle")) {
      predictor = std::make_unique<OraclePredictor>();
    } else {
      model = load_checkpoint(required(c, "checkpoint"));
      if (model->config().n_rows != cfg.n_obs) {
        throw ConfigError("the model reads " + std::to_string(model->config().n_rows) + " rows but n_obs is " +
                          std::to_string(cfg.n_obs));
      }
      predictor = std::make_unique<ModelPredictor>(*model);
    }
    const std::vector<SrsdProblem> problems = load_problem_set(required(c, "problems"), opt);
    if (problems.empty()) throw ProblemParseError(0, 0, "no problems found under " + c.get("problems"));
    write_run_cfg(out, c, "evaluate");
    const EvalReport report = evaluate_problems(*predictor, problems, cfg);
    std::ofstream(out / "report.json", std::ios::trunc) << report_json(report);
    std::ofstream(out / "report.csv", std::ios::trunc) << report_csv(report);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << std::fixed << std::setprecision(4);
    for (const auto& [group, s] : report.groups) {
      std::cout << group << " " << s.mean_nted << " (" << s.problems << " problems";
      if (s.excluded) std::cout << ", " << s.excluded << " excluded";
      std::cout << ")\n";
    }
  };
  return cmd;
}

// ---------------------------------------------------------------- count-params

Command count_params_command() {
  Command cmd{"count-params", "Print closed-form and allocated parameter counts", {}, {}};
  RunConfig& c = cmd.config;
  const ModelConfig d;
  c.declare("d_model", std::to_string(d.d_model), "model width");
  c.declare("n_enc", std::to_string(d.n_enc), "encoder layers");
  c.declare("n_dec", std::to_string(d.n_dec), "decoder layers");
  c.declare("heads", std::to_string(d.heads), "attention heads");
  c.declare("vocab", std::to_string(d.vocab), "vocabulary size");
  c.declare("max_len", std::to_string(d.max_len), "decoder length M");
  c.declare("encoder", "all", "mlp, att, mix or all");
  cmd.run = [](const RunConfig& c) {
    apply_threads(c);
    ModelConfig m;
    m.d_model = positive(c, "d_model");
    m.n_enc = positive(c, "n_enc");
    m.n_dec = positive(c, "n_dec");
    m.heads = positive(c, "heads");
    m.vocab = positive(c, "vocab");
    m.max_len = positive(c, "max_len");
    std::vector<EncoderKind> kinds{EncoderKind::kMlp, EncoderKind::kAtt, EncoderKind::kMix};
    if (c.get("encoder") != "all") {
      const auto k = encoder_kind_from_name(c.get("encoder"));
      if (!k) throw ConfigError("unknown encoder '" + c.get("encoder") + "'");
      kinds = {*k};
    }
    m.validate();
    std::cout << std::left << std::setw(8) << "encoder" << std::right << std::setw(14) << "closed_form"
              << std::setw(14) << "allocated" << "\n";
    for (EncoderKind k : kinds) {
      m.encoder = k;
      const ParamCount n = count_params(m);
      std::cout << std::left << std::setw(8) << encoder_kind_name(k) << std::right << std::setw(14)
                << with_commas(n.closed_form) << std::setw(14) << with_commas(n.allocated) << "\n";
    }
  };
  return cmd;
}

// ---------------------------------------------------------------- ted

Command ted_command() {
  Command cmd{"ted", "Tree edit distance between two expressions", {}, {}};
  RunConfig& c = cmd.config;
  c.declare("pred", "", "predicted expression (token line or infix)");
  c.declare("truth", "", "ground-truth expression (token line or infix)");
  c.declare("simplify", "false", "simplify both expressions first", true);
  cmd.run = [](const RunConfig& c) {
    apply_threads(c);
    ExprTree pred = parse_expression(required(c, "pred"));
    ExprTree truth = parse_expression(required(c, "truth"));
    if (c.get_bool("simplify")) {
      pred = simplify(pred);
      truth = simplify(truth);
    }
    std::cout << "ted " << ted(pred, truth) << "\n"
              << "normalized " << normalized_ted(pred, truth) << "\n";
  };
  return cmd;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const IncompleteDecode& e) {
    std::cerr << "incomplete decode: " << e.what() << "\n"
              << "partial: " << to_text(e.partial()) << "\n";
    return kNumeric;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const CorpusFormatError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kData;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kData;
  } catch (const ProblemParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kData;
  } catch (const InfixParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kData;
  } catch (const SequenceParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kData;
  } catch (const InvalidTokenError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"srforge: transformer-based symbolic regression"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  std::vector<Command> commands;
  commands.push_back(generate_command());
  commands.push_back(train_command());
  commands.push_back(predict_command());
  commands.push_back(evaluate_command());
  commands.push_back(count_params_command());
  commands.push_back(ted_command());

  struct Binding {
    std::string key;
    CLI::Option* option;
    std::string text;
    bool flag_value = false;
  };
  std::map<std::string, std::vector<std::unique_ptr<Binding>>> bindings;
  std::map<std::string, std::string> config_files;
  std::map<std::string, CLI::App*> subs;
  for (Command& cmd : commands) {
    cmd.config.declare("threads", "1", "worker threads (also SRFORGE_THREADS)");
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    sub->add_option("--config", config_files[cmd.name], "key = value settings file");
    for (const auto& e : cmd.config.entries()) {
      auto b = std::make_unique<Binding>();
      b->key = e.key;
      std::string flag = "--" + e.key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      const std::string help = e.value.empty() ? e.help : e.help + " [" + e.value + "]";
      b->option = e.flag ? sub->add_flag(flag, b->flag_value, help) : sub->add_option(flag, b->text, help);
      bindings[cmd.name].push_back(std::move(b));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  for (Command& cmd : commands) {
    if (!subs[cmd.name]->parsed()) continue;
    return guarded([&] {
      RunConfig& c = cmd.config;
      if (!config_files[cmd.name].empty()) c.merge_file(config_files[cmd.name]);
      if (const char* env = std::getenv("SRFORGE_THREADS"); env && *env) c.set("threads", env);
      for (const auto& b : bindings[cmd.name]) {
        if (b->option->count() == 0) continue;
        c.set(b->key, b->option->get_expected_min() == 0 ? (b->flag_value ? "true" : "false") : b->text);
      }
      cmd.run(c);
    });
  }
  return kUsage;
}

}  // namespace
}  // namespace srforge::cli

int main(int argc, char** argv) { return srforge::cli::run(argc, argv); }
