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

#ifndef LAYERGA_ENGINE_HPP_
#define LAYERGA_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layerga/evaluation.hpp"
#include "layerga/genome.hpp"
#include "layerga/operators.hpp"
#include "layerga/random.hpp"

namespace layerga {

struct RunConfig {
  std::size_t population_size = 50;
  std::size_t max_generations = 15;
  double q_m = kDefaultMutationProb;
  double q_c = kDefaultCrossoverProb;
  double gamma = kDefaultGamma;
  int l_max = kDefaultLMax;
  int bits_per_param = kDefaultBitsPerParam;
  std::uint64_t seed = 0;
  bool elitism = false;
  // Stop after this many generations without a better best fitness; 0 = off.
  std::size_t stagnation_window = 0;
  // Conventional ordering: evaluate offspring, then select on their fitness.
  bool evaluate_before_selection = false;
  // Retries for an individual whose evaluation came back as an error.
  int max_retries = 1;
  bool cache = true;
  // Execution-only knobs; they never change results and are not reported.
  int jobs = 1;
  std::string evaluator = "synthetic:unimodal";

  // Throws ConfigError.
  void validate() const;

  GenomeLayout layout() const { return GenomeLayout{bits_per_param, l_max}; }
  OperatorParams operator_params() const { return OperatorParams{q_m, q_c, elitism}; }
  FitnessParams fitness_params() const { return FitnessParams{gamma}; }
};

struct Individual {
  BitGenome genome;
  Window window;
  double accuracy = 0.0;
  double fitness = 0.0;
};

// One row of the per-generation table: accuracy extremes plus the window of
// the fittest individual.
struct GenerationStats {
  std::size_t generation = 0;  // 1-based
  double max_acc = 0.0;
  double min_acc = 0.0;
  double avg_acc = 0.0;
  Window best_window;
  double best_fitness = 0.0;
};

enum class TerminationReason { kMaxGenerations, kStagnation, kEvaluatorFailure };

std::string to_string(TerminationReason reason);
std::optional<TerminationReason> termination_from_string(const std::string& text);

struct RunReport {
  RunConfig config;
  std::vector<GenerationStats> generations;
  std::optional<Individual> best;
  std::uint64_t total_evaluations = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t failed_evaluations = 0;
  TerminationReason termination = TerminationReason::kMaxGenerations;
  bool complete = true;
  std::string error;
};

// Stats over an evaluated population. Ties for the best go to the lowest
// index. Throws EmptyPopulationError on an empty span.
GenerationStats compute_stats(std::span<const Individual> population, std::size_t generation);

// Stop at max_generations, or once the best fitness seen has not improved
// for `stagnation_window` consecutive generations.
std::optional<TerminationReason> check_stop(std::span<const GenerationStats> history,
                                            const RunConfig& config);

// Everything needed to continue a run exactly where it left off.
struct EngineState {
  std::vector<Individual> population;
  std::vector<GenerationStats> history;
  std::optional<Individual> best;
  std::uint64_t total_evaluations = 0;
  std::uint64_t failed_evaluations = 0;
  std::string rng_pairing;
  std::string rng_crossover;
  std::string rng_mutation;
  std::string rng_selection;
  std::vector<std::pair<Window, double>> cache_entries;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
};

class Engine {
 public:
  using Observer = std::function<void(const Engine&)>;

  // Wraps the evaluator in a cache when config.cache is set and the
  // evaluator is deterministic.
  Engine(RunConfig config, std::shared_ptr<Evaluator> evaluator);

  // Continues from a checkpointed state.
  static Engine resume(RunConfig config, std::shared_ptr<Evaluator> evaluator,
                       const EngineState& state);

  // Random generation 1, evaluated.
  const GenerationStats& initialize();

  // Crossover, mutation, roulette selection, evaluation.
  const GenerationStats& step();

  // Runs to termination. `observer` fires after every evaluated generation.
  // Evaluator failures end the run early with an incomplete report.
  RunReport run(const Observer& observer = {});

  std::optional<TerminationReason> should_stop() const;

  const RunConfig& config() const { return config_; }
  const std::vector<Individual>& population() const { return population_; }
  const std::vector<GenerationStats>& history() const { return history_; }
  const std::optional<Individual>& best() const { return best_; }
  std::size_t generation() const { return history_.size(); }

  EngineState snapshot() const;
  RunReport report() const;

  void set_jobs(int jobs) { config_.jobs = jobs; }

 private:
  std::vector<Individual> evaluate(std::vector<BitGenome> genomes);
  const GenerationStats& record(std::vector<Individual> population);
  std::size_t best_index() const;

  RunConfig config_;
  GenomeLayout layout_;
  std::shared_ptr<Evaluator> evaluator_;
  std::shared_ptr<CachingEvaluator> cache_;
  Rng rng_pairing_;
  Rng rng_crossover_;
  Rng rng_mutation_;
  Rng rng_selection_;
  Rng rng_init_;
  std::vector<Individual> population_;
  std::vector<GenerationStats> history_;
  std::optional<Individual> best_;
  std::uint64_t total_evaluations_ = 0;
  std::uint64_t failed_evaluations_ = 0;
  bool failed_ = false;
  std::string error_;
};

// Convenience: a full run with a fresh engine.
RunReport run(const RunConfig& config, std::shared_ptr<Evaluator> evaluator,
              const Engine::Observer& observer = {});

}  // namespace layerga

#endif  // LAYERGA_ENGINE_HPP_
