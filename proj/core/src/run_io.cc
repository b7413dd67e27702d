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

#include "layerga/run_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "internal/text.hpp"
#include "layerga/error.hpp"

namespace layerga {

namespace {

using nlohmann::ordered_json;

ordered_json config_to_json(const RunConfig& c) {
  ordered_json j;
  j["population_size"] = c.population_size;
  j["max_generations"] = c.max_generations;
  j["q_m"] = c.q_m;
  j["q_c"] = c.q_c;
  j["gamma"] = c.gamma;
  j["l_max"] = c.l_max;
  j["bits_per_param"] = c.bits_per_param;
  j["seed"] = c.seed;
  j["elitism"] = c.elitism;
  j["stagnation_window"] = c.stagnation_window;
  j["evaluate_before_selection"] = c.evaluate_before_selection;
  j["max_retries"] = c.max_retries;
  j["cache"] = c.cache;
  j["evaluator"] = c.evaluator;
  return j;
}

RunConfig config_from_json(const ordered_json& j) {
  RunConfig c;
  c.population_size = j.at("population_size").get<std::size_t>();
  c.max_generations = j.at("max_generations").get<std::size_t>();
  c.q_m = j.at("q_m").get<double>();
  c.q_c = j.at("q_c").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.l_max = j.at("l_max").get<int>();
  c.bits_per_param = j.at("bits_per_param").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.elitism = j.at("elitism").get<bool>();
  c.stagnation_window = j.at("stagnation_window").get<std::size_t>();
  c.evaluate_before_selection = j.at("evaluate_before_selection").get<bool>();
  c.max_retries = j.at("max_retries").get<int>();
  c.cache = j.at("cache").get<bool>();
  c.evaluator = j.at("evaluator").get<std::string>();
  return c;
}

ordered_json individual_to_json(const Individual& ind) {
  ordered_json j;
  j["genome"] = ind.genome.to_string();
  j["l_start"] = ind.window.l_start;
  j["l_end"] = ind.window.l_end;
  j["accuracy"] = ind.accuracy;
  j["fitness"] = ind.fitness;
  return j;
}

Individual individual_from_json(const ordered_json& j) {
  Individual ind;
  ind.genome = BitGenome::from_string(j.at("genome").get<std::string>());
  ind.window = Window{j.at("l_start").get<int>(), j.at("l_end").get<int>()};
  ind.accuracy = j.at("accuracy").get<double>();
  ind.fitness = j.at("fitness").get<double>();
  return ind;
}

ordered_json stats_to_json(const GenerationStats& s) {
  ordered_json j;
  j["gen"] = s.generation;
  j["max"] = s.max_acc;
  j["min"] = s.min_acc;
  j["avg"] = s.avg_acc;
  j["best_l_start"] = s.best_window.l_start;
  j["best_l_end"] = s.best_window.l_end;
  j["best_fitness"] = s.best_fitness;
  return j;
}

GenerationStats stats_from_json(const ordered_json& j) {
  GenerationStats s;
  s.generation = j.at("gen").get<std::size_t>();
  s.max_acc = j.at("max").get<double>();
  s.min_acc = j.at("min").get<double>();
  s.avg_acc = j.at("avg").get<double>();
  s.best_window = Window{j.at("best_l_start").get<int>(), j.at("best_l_end").get<int>()};
  s.best_fitness = j.at("best_fitness").get<double>();
  return s;
}

}  // namespace

void write_generations_csv(std::ostream& out, std::span<const GenerationStats> history) {
  out << kGenerationsHeader << '\n';
  for (const auto& s : history) {
    out << s.generation << ',' << internal::format_fixed(s.max_acc, 4) << ','
        << internal::format_fixed(s.min_acc, 4) << ',' << internal::format_fixed(s.avg_acc, 4)
        << ',' << s.best_window.l_start << ',' << s.best_window.l_end << '\n';
  }
}

std::string generations_csv(std::span<const GenerationStats> history) {
  std::ostringstream out;
  write_generations_csv(out, history);
  return out.str();
}

void append_population_jsonl(std::ostream& out, std::size_t gen,
                             std::span<const Individual> population) {
  for (const auto& ind : population) {
    ordered_json j;
    j["gen"] = gen;
    const ordered_json fields = individual_to_json(ind);
    for (const auto& [key, value] : fields.items()) j[key] = value;
    out << j.dump() << '\n';
  }
}

std::string report_json(const RunReport& report) {
  ordered_json j;
  j["config"] = config_to_json(report.config);
  j["generations"] = ordered_json::array();
  for (const auto& s : report.generations) j["generations"].push_back(stats_to_json(s));
  j["best"] = report.best ? individual_to_json(*report.best) : ordered_json(nullptr);
  j["total_evaluations"] = report.total_evaluations;
  j["cache_hits"] = report.cache_hits;
  j["failed_evaluations"] = report.failed_evaluations;
  j["termination"] = to_string(report.termination);
  j["complete"] = report.complete;
  if (!report.error.empty()) j["error"] = report.error;
  return j.dump(2) + "\n";
}

std::string checkpoint_json(const RunConfig& config, const EngineState& state) {
  ordered_json j;
  j["format"] = "layerga-checkpoint/1";
  j["config"] = config_to_json(config);
  j["population"] = ordered_json::array();
  for (const auto& ind : state.population) j["population"].push_back(individual_to_json(ind));
  j["history"] = ordered_json::array();
  for (const auto& s : state.history) j["history"].push_back(stats_to_json(s));
  j["best"] = state.best ? individual_to_json(*state.best) : ordered_json(nullptr);
  j["total_evaluations"] = state.total_evaluations;
  j["failed_evaluations"] = state.failed_evaluations;
  j["rng"] = {{"pairing", state.rng_pairing},
              {"crossover", state.rng_crossover},
              {"mutation", state.rng_mutation},
              {"selection", state.rng_selection}};
  j["cache"] = {{"hits", state.cache_hits},
                {"misses", state.cache_misses},
                {"entries", ordered_json::array()}};
  for (const auto& [w, acc] : state.cache_entries) {
    j["cache"]["entries"].push_back(ordered_json::array({w.l_start, w.l_end, acc}));
  }
  return j.dump() + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    if (j.at("format").get<std::string>() != "layerga-checkpoint/1") {
      throw ParseError("unknown checkpoint format", 0);
    }
    Checkpoint c;
    c.config = config_from_json(j.at("config"));
    for (const auto& ind : j.at("population")) c.state.population.push_back(individual_from_json(ind));
    for (const auto& s : j.at("history")) c.state.history.push_back(stats_from_json(s));
    if (!j.at("best").is_null()) c.state.best = individual_from_json(j.at("best"));
    c.state.total_evaluations = j.at("total_evaluations").get<std::uint64_t>();
    c.state.failed_evaluations = j.at("failed_evaluations").get<std::uint64_t>();
    const auto& rng = j.at("rng");
    c.state.rng_pairing = rng.at("pairing").get<std::string>();
    c.state.rng_crossover = rng.at("crossover").get<std::string>();
    c.state.rng_mutation = rng.at("mutation").get<std::string>();
    c.state.rng_selection = rng.at("selection").get<std::string>();
    const auto& cache = j.at("cache");
    c.state.cache_hits = cache.at("hits").get<std::uint64_t>();
    c.state.cache_misses = cache.at("misses").get<std::uint64_t>();
    for (const auto& e : cache.at("entries")) {
      c.state.cache_entries.emplace_back(Window{e.at(0).get<int>(), e.at(1).get<int>()},
                                         e.at(2).get<double>());
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what(), 0);
  } catch (const MalformedGenomeError& e) {
    throw ParseError(std::string("malformed checkpoint: ") + e.what(), 0);
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << contents;
    if (!out.flush()) throw Error("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "': file not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace layerga
