// Copyright 2026 The layerga Authors.
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

#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evaluator_spec.hpp"
#include "layerga/analysis.hpp"
#include "layerga/engine.hpp"
#include "layerga/error.hpp"
#include "layerga/oracle.hpp"
#include "layerga/run_io.hpp"

namespace layerga::cli {

namespace fs = std::filesystem;

namespace {

struct RunFlags {
  RunConfig config;
  std::string out_dir = "layerga-out";
  std::string resume;
};

struct EnumerateFlags {
  std::string evaluator = "synthetic:unimodal";
  double gamma = kDefaultGamma;
  int l_max = kDefaultLMax;
  int jobs = 1;
  bool full_table = false;
  std::string out_dir = "layerga-out";
};

struct AnalyzeFlags {
  std::string input;
  std::string stat = "sum";
  double threshold = 0.0;
  std::string categories;
  std::size_t top = 6;
  std::string window;
  std::string out_dir = "layerga-out";
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void print_table(std::ostream& out, const std::vector<GenerationStats>& history) {
  out << std::setw(4) << "Gen" << std::setw(8) << "Max" << std::setw(8) << "Min"
      << std::setw(8) << "Avg" << std::setw(7) << "Start" << std::setw(7) << "End" << '\n';
  for (const auto& s : history) {
    out << std::setw(4) << s.generation << std::setw(8) << fixed(s.max_acc) << std::setw(8)
        << fixed(s.min_acc) << std::setw(8) << fixed(s.avg_acc) << std::setw(7)
        << s.best_window.l_start << std::setw(7) << s.best_window.l_end << '\n';
  }
}

// Keeps population records from generations that the checkpoint covers, so
// a resumed run ends up with the same file as an uninterrupted one.
void trim_population_file(const fs::path& path, std::size_t last_gen) {
  if (!fs::exists(path)) return;
  std::ifstream in(path);
  std::string kept;
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("gen")) continue;
    if (j["gen"].get<std::size_t>() <= last_gen) kept += line + '\n';
  }
  in.close();
  write_file_atomic(path.string(), kept);
}

int execute_run(const RunConfig& config, const std::optional<Checkpoint>& checkpoint,
                const std::string& out_dir, std::ostream& out, std::ostream& err) {
  config.validate();
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  auto evaluator = make_evaluator(config.evaluator);
  std::optional<Engine> engine;
  if (checkpoint) {
    engine.emplace(Engine::resume(config, evaluator, checkpoint->state));
    trim_population_file(dir / "population.jsonl", checkpoint->state.history.size());
  } else {
    engine.emplace(config, evaluator);
    std::ofstream(dir / "population.jsonl", std::ios::trunc);
  }

  std::ofstream population(dir / "population.jsonl", std::ios::app);
  if (!population) throw Error("cannot write " + (dir / "population.jsonl").string());
  const std::string checkpoint_path = (dir / "checkpoint.json").string();
  auto observer = [&](const Engine& e) {
    append_population_jsonl(population, e.generation(), e.population());
    population.flush();
    write_file_atomic(checkpoint_path, checkpoint_json(e.config(), e.snapshot()));
  };

  const RunReport report = engine->run(observer);
  population.close();
  write_file_atomic((dir / "generations.csv").string(), generations_csv(report.generations));
  write_file_atomic((dir / "report.json").string(), report_json(report));

  print_table(out, report.generations);
  if (report.best) {
    out << "best window " << to_string(report.best->window) << " accuracy "
        << fixed(report.best->accuracy) << " fitness " << fixed(report.best->fitness) << '\n';
  }
  out << "stopped after " << report.generations.size() << " generation(s): "
      << to_string(report.termination) << "; " << report.total_evaluations << " evaluations, "
      << report.cache_hits << " cache hits\n";
  if (!report.complete) {
    err << "layerga: run incomplete: " << report.error << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int execute_enumerate(const EnumerateFlags& flags, std::ostream& out, std::ostream& err) {
  auto evaluator = make_evaluator(flags.evaluator);
  if (!evaluator->deterministic()) {
    err << "layerga: refusing to enumerate with " << evaluator->describe()
        << ": it declared itself non-deterministic, so a single measurement per window "
           "is not a ground truth\n";
    return kExitFailure;
  }
  OracleOptions options;
  options.gamma = flags.gamma;
  options.l_max = flags.l_max;
  options.jobs = flags.jobs;
  options.keep_table = flags.full_table;
  const OracleReport report = enumerate_best(*evaluator, options);

  fs::create_directories(flags.out_dir);
  const fs::path dir(flags.out_dir);
  nlohmann::ordered_json j;
  j["evaluator"] = flags.evaluator;
  j["gamma"] = flags.gamma;
  j["l_max"] = flags.l_max;
  j["enumerated"] = report.enumerated;
  j["best"] = {{"l_start", report.best.window.l_start},
               {"l_end", report.best.window.l_end},
               {"accuracy", report.best.accuracy},
               {"fitness", report.best.fitness}};
  write_file_atomic((dir / "oracle.json").string(), j.dump(2) + "\n");
  if (flags.full_table) {
    std::ostringstream table;
    write_oracle_table(table, report.table);
    write_file_atomic((dir / "oracle_table.csv").string(), table.str());
  }

  out << "enumerated " << report.enumerated << " configurations\n";
  out << "best window " << to_string(report.best.window) << " accuracy "
      << fixed(report.best.accuracy) << " fitness " << fixed(report.best.fitness) << '\n';
  return kExitOk;
}

std::optional<Window> parse_window_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("no comma");
    return Window{std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--window takes a,b; got '" + text + "'");
  }
}

int execute_analyze(const AnalyzeFlags& flags, std::ostream& out, std::ostream& err) {
  const auto stat = statistic_from_string(flags.stat);
  if (!stat) throw ConfigError("--stat must be max, mean or sum");
  const auto window = parse_window_flag(flags.window);

  const auto records = load_gradients(flags.input);
  const auto summaries = summarize(records);

  fs::create_directories(flags.out_dir);
  const fs::path dir(flags.out_dir);
  {
    std::ostringstream csv;
    write_summary_csv(csv, summaries);
    write_file_atomic((dir / "gradient_summary.csv").string(), csv.str());
  }

  out << "layer,category," << to_string(*stat) << '\n';
  for (const auto& s : summaries) {
    out << s.layer << ',' << s.category << ',' << s.value(*stat) << '\n';
  }

  const auto top = top_magnitude_layers(summaries, *stat, flags.top);
  out << "top " << top.size() << " layers by |" << to_string(*stat) << "|:";
  for (const auto& l : top) out << ' ' << l.layer;
  out << '\n';
  if (window) {
    out << "inside window " << to_string(*window) << ":";
    for (int l : layers_within(top, *window)) out << ' ' << l;
    out << '\n';
  }

  std::string cat_a;
  std::string cat_b;
  if (!flags.categories.empty()) {
    const auto comma = flags.categories.find(',');
    if (comma == std::string::npos) throw ConfigError("--categories takes a,b");
    cat_a = flags.categories.substr(0, comma);
    cat_b = flags.categories.substr(comma + 1);
  } else {
    const auto labels = categories(summaries);
    if (labels.size() == 2) {
      cat_a = labels[0];
      cat_b = labels[1];
    } else {
      err << "layerga: " << labels.size()
          << " categories present; pass --categories a,b for the sign comparison\n";
      return kExitOk;
    }
  }

  const auto result = sign_opposition(summaries, cat_a, cat_b, flags.threshold);
  std::ostringstream jsonl;
  write_findings_jsonl(jsonl, result.findings);
  write_file_atomic((dir / "opposition.jsonl").string(), jsonl.str());
  out << "sign-opposite layers (" << cat_a << " vs " << cat_b << "):";
  for (const auto& f : result.findings) {
    if (f.flagged) out << ' ' << f.layer;
  }
  out << '\n';
  if (!result.skipped_layers.empty()) {
    out << "skipped layers missing a category:";
    for (int l : result.skipped_layers) out << ' ' << l;
    out << '\n';
  }
  return kExitOk;
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  auto& c = f.config;
  cmd->add_option("--pop-size", c.population_size, "individuals per generation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--generations", c.max_generations, "maximum generations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--q-m", c.q_m, "per-bit mutation probability")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--q-c", c.q_c, "per-block exchange probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--gamma", c.gamma, "fitness penalty per layer of span")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--l-max", c.l_max, "largest layer index")->check(CLI::Range(0, 255));
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_flag("--elitism", c.elitism, "keep the previous best individual");
  cmd->add_option("--stagnation", c.stagnation_window,
                  "stop after this many generations without improvement (0 = off)");
  cmd->add_flag("--evaluate-before-selection", c.evaluate_before_selection,
                "evaluate offspring and select on their own fitness");
  cmd->add_option("--evaluator", c.evaluator, "synthetic:<name> | table:<path> | external:<cmd>");
  cmd->add_option("--jobs", c.jobs, "parallel evaluations")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", f.out_dir, "output directory");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Genetic search for the trainable layer window of a transfer network", "layerga"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run the genetic search");
  add_run_flags(run_cmd, run_flags);
  auto* resume_opt = run_cmd->add_option("--resume", run_flags.resume,
                                         "continue from a checkpoint file");
  for (const char* name : {"--pop-size", "--q-m", "--q-c", "--gamma", "--l-max", "--seed",
                           "--elitism", "--stagnation", "--evaluate-before-selection"}) {
    resume_opt->excludes(run_cmd->get_option(name));
  }

  std::string resume_path;
  RunFlags resume_flags;
  auto* resume_cmd = app.add_subcommand("resume", "continue a run from its checkpoint");
  resume_cmd->add_option("checkpoint", resume_path, "checkpoint.json")->required();
  resume_cmd->add_option("--generations", resume_flags.config.max_generations,
                         "new maximum generation count")
      ->check(CLI::PositiveNumber);
  resume_cmd->add_option("--evaluator", resume_flags.config.evaluator, "override the evaluator");
  resume_cmd->add_option("--jobs", resume_flags.config.jobs, "parallel evaluations")
      ->check(CLI::PositiveNumber);
  resume_cmd->add_option("--out-dir", resume_flags.out_dir, "output directory");

  EnumerateFlags enum_flags;
  auto* enum_cmd = app.add_subcommand("enumerate", "exhaustively score every window");
  enum_cmd->add_option("--evaluator", enum_flags.evaluator, "evaluator selector");
  enum_cmd->add_option("--gamma", enum_flags.gamma, "fitness penalty per layer of span")
      ->check(CLI::NonNegativeNumber);
  enum_cmd->add_option("--l-max", enum_flags.l_max, "largest layer index")
      ->check(CLI::Range(0, 255));
  enum_cmd->add_option("--jobs", enum_flags.jobs, "parallel evaluations")
      ->check(CLI::PositiveNumber);
  enum_cmd->add_flag("--full-table", enum_flags.full_table, "write oracle_table.csv");
  enum_cmd->add_option("--out-dir", enum_flags.out_dir, "output directory");

  AnalyzeFlags an_flags;
  auto* an_cmd = app.add_subcommand("analyze-gradients", "per-layer gradient statistics");
  an_cmd->add_option("input,--input", an_flags.input, "CSV layer,category,value")->required();
  an_cmd->add_option("--stat", an_flags.stat, "max | mean | sum")
      ->check(CLI::IsMember({"max", "mean", "sum"}));
  an_cmd->add_option("--threshold", an_flags.threshold, "minimum |sum| for sign opposition")
      ->check(CLI::NonNegativeNumber);
  an_cmd->add_option("--categories", an_flags.categories, "two labels to compare, a,b");
  an_cmd->add_option("--top", an_flags.top, "how many layers to rank")
      ->check(CLI::PositiveNumber);
  an_cmd->add_option("--window", an_flags.window, "report top layers inside a,b");
  an_cmd->add_option("--out-dir", an_flags.out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "layerga: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      if (!run_flags.resume.empty()) {
        auto checkpoint = parse_checkpoint(read_file(run_flags.resume));
        RunConfig config = checkpoint.config;
        if (run_cmd->count("--generations")) config.max_generations = run_flags.config.max_generations;
        if (run_cmd->count("--evaluator")) config.evaluator = run_flags.config.evaluator;
        config.jobs = run_flags.config.jobs;
        return execute_run(config, checkpoint, run_flags.out_dir, out, err);
      }
      return execute_run(run_flags.config, std::nullopt, run_flags.out_dir, out, err);
    }
    if (resume_cmd->parsed()) {
      auto checkpoint = parse_checkpoint(read_file(resume_path));
      RunConfig config = checkpoint.config;
      if (resume_cmd->count("--generations")) {
        config.max_generations = resume_flags.config.max_generations;
      }
      if (resume_cmd->count("--evaluator")) config.evaluator = resume_flags.config.evaluator;
      config.jobs = resume_flags.config.jobs;
      return execute_run(config, checkpoint, resume_flags.out_dir, out, err);
    }
    if (enum_cmd->parsed()) return execute_enumerate(enum_flags, out, err);
    if (an_cmd->parsed()) return execute_analyze(an_flags, out, err);
  } catch (const ConfigError& e) {
    err << "layerga: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "layerga: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace layerga::cli
