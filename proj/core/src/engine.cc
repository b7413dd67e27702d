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

#include "layerga/engine.hpp"

#include <algorithm>
#include <numeric>

#include "layerga/error.hpp"

namespace layerga {

void RunConfig::validate() const {
  if (population_size < 1) throw ConfigError("population size must be >= 1");
  if (max_generations < 1) throw ConfigError("generation count must be >= 1");
  if (max_retries < 0) throw ConfigError("retry budget must be >= 0");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  operator_params().validate();
  fitness_params().validate();
  layout().validate();
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kMaxGenerations:
      return "max-generations";
    case TerminationReason::kStagnation:
      return "stagnation";
    case TerminationReason::kEvaluatorFailure:
      return "evaluator-failure";
  }
  return "unknown";
}

std::optional<TerminationReason> termination_from_string(const std::string& text) {
  for (auto r : {TerminationReason::kMaxGenerations, TerminationReason::kStagnation,
                 TerminationReason::kEvaluatorFailure}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

GenerationStats compute_stats(std::span<const Individual> population, std::size_t generation) {
  if (population.empty()) throw EmptyPopulationError("no individuals to summarize");
  GenerationStats s;
  s.generation = generation;
  s.max_acc = population.front().accuracy;
  s.min_acc = population.front().accuracy;
  double sum = 0.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto& ind = population[i];
    s.max_acc = std::max(s.max_acc, ind.accuracy);
    s.min_acc = std::min(s.min_acc, ind.accuracy);
    sum += ind.accuracy;
    if (ind.fitness > population[best].fitness) best = i;
  }
  // Clamp away rounding so min <= avg <= max holds exactly.
  s.avg_acc = std::clamp(sum / static_cast<double>(population.size()), s.min_acc, s.max_acc);
  s.best_window = population[best].window;
  s.best_fitness = population[best].fitness;
  return s;
}

std::optional<TerminationReason> check_stop(std::span<const GenerationStats> history,
                                            const RunConfig& config) {
  if (history.empty()) return std::nullopt;
  if (history.size() >= config.max_generations) return TerminationReason::kMaxGenerations;
  if (config.stagnation_window > 0) {
    double best = history.front().best_fitness;
    std::size_t last_improvement = 0;
    for (std::size_t g = 1; g < history.size(); ++g) {
      if (history[g].best_fitness > best) {
        best = history[g].best_fitness;
        last_improvement = g;
      }
    }
    if (history.size() - 1 - last_improvement >= config.stagnation_window) {
      return TerminationReason::kStagnation;
    }
  }
  return std::nullopt;
}

Engine::Engine(RunConfig config, std::shared_ptr<Evaluator> evaluator)
    : config_(std::move(config)),
      layout_(config_.layout()),
      evaluator_(std::move(evaluator)),
      rng_pairing_(Rng::for_stream(config_.seed, Stream::kPairing)),
      rng_crossover_(Rng::for_stream(config_.seed, Stream::kCrossover)),
      rng_mutation_(Rng::for_stream(config_.seed, Stream::kMutation)),
      rng_selection_(Rng::for_stream(config_.seed, Stream::kSelection)),
      rng_init_(Rng::for_stream(config_.seed, Stream::kInit)) {
  config_.validate();
  if (!evaluator_) throw ConfigError("engine needs an evaluator");
  if (config_.cache && evaluator_->deterministic()) {
    cache_ = std::make_shared<CachingEvaluator>(evaluator_);
    evaluator_ = cache_;
  }
}

Engine Engine::resume(RunConfig config, std::shared_ptr<Evaluator> evaluator,
                      const EngineState& state) {
  Engine engine(std::move(config), std::move(evaluator));
  if (state.population.size() != engine.config_.population_size) {
    throw ConfigError("checkpoint population has " + std::to_string(state.population.size()) +
                      " individuals, config expects " +
                      std::to_string(engine.config_.population_size));
  }
  if (state.history.empty()) throw ConfigError("checkpoint has no completed generation");
  for (const auto& ind : state.population) {
    if (decode(ind.genome, engine.layout_) != ind.window) {
      throw ConfigError("checkpoint individual " + ind.genome.to_string() +
                        " does not decode to its stored window");
    }
  }
  engine.population_ = state.population;
  engine.history_ = state.history;
  engine.best_ = state.best;
  engine.total_evaluations_ = state.total_evaluations;
  engine.failed_evaluations_ = state.failed_evaluations;
  engine.rng_pairing_.restore_state(state.rng_pairing);
  engine.rng_crossover_.restore_state(state.rng_crossover);
  engine.rng_mutation_.restore_state(state.rng_mutation);
  engine.rng_selection_.restore_state(state.rng_selection);
  if (engine.cache_) {
    engine.cache_->restore(state.cache_entries, state.cache_hits, state.cache_misses);
  }
  return engine;
}

std::vector<Individual> Engine::evaluate(std::vector<BitGenome> genomes) {
  const FitnessParams fp = config_.fitness_params();
  std::vector<Individual> pop(genomes.size());
  std::vector<std::size_t> todo(genomes.size());
  std::iota(todo.begin(), todo.end(), std::size_t{0});
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    pop[i].window = decode(genomes[i], layout_);
    pop[i].genome = std::move(genomes[i]);
  }

  for (int attempt = 0; attempt <= config_.max_retries && !todo.empty(); ++attempt) {
    std::vector<EvalRequest> batch;
    batch.reserve(todo.size());
    for (auto i : todo) batch.push_back(EvalRequest{i, pop[i].window});
    total_evaluations_ += batch.size();
    auto answers = evaluator_->evaluate_batch(batch, BatchOptions{config_.jobs});
    std::vector<std::size_t> retry;
    for (std::size_t k = 0; k < answers.size(); ++k) {
      const auto i = todo[k];
      if (answers[k].ok()) {
        validate_accuracy(*answers[k].accuracy, to_string(pop[i].window));
        pop[i].accuracy = *answers[k].accuracy;
      } else {
        retry.push_back(i);
      }
    }
    todo = std::move(retry);
  }
  // Out of retries: keep the slot, with the lowest possible accuracy.
  for (auto i : todo) {
    pop[i].accuracy = 0.0;
    ++failed_evaluations_;
  }
  for (auto& ind : pop) ind.fitness = fitness(ind.accuracy, ind.window, fp);
  return pop;
}

const GenerationStats& Engine::record(std::vector<Individual> population) {
  population_ = std::move(population);
  history_.push_back(compute_stats(population_, history_.size() + 1));
  const auto& top = population_[best_index()];
  if (!best_ || top.fitness > best_->fitness) best_ = top;
  return history_.back();
}

std::size_t Engine::best_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population_.size(); ++i) {
    if (population_[i].fitness > population_[best].fitness) best = i;
  }
  return best;
}

const GenerationStats& Engine::initialize() {
  if (!history_.empty()) throw InternalError("engine already initialized");
  std::vector<BitGenome> genomes;
  genomes.reserve(config_.population_size);
  for (std::size_t i = 0; i < config_.population_size; ++i) {
    genomes.push_back(random_genome(rng_init_, layout_));
  }
  return record(evaluate(std::move(genomes)));
}

const GenerationStats& Engine::step() {
  if (history_.empty()) throw InternalError("engine not initialized");
  const std::size_t m = config_.population_size;

  std::vector<BitGenome> offspring;
  std::vector<double> carried;
  offspring.reserve(m);
  carried.reserve(m);
  for (const auto& ind : population_) {
    offspring.push_back(ind.genome);
    carried.push_back(ind.fitness);
  }

  // Crossover over random disjoint pairs. Each child carries the fitness of
  // the parent that supplied its l_start block.
  if (m >= 2) {
    const auto pairing = pair_population(m, rng_pairing_);
    for (const auto& [i, j] : pairing.pairs) {
      auto out = crossover(population_[i].genome, population_[j].genome, config_.q_c,
                           rng_crossover_, layout_);
      offspring[i] = std::move(out.first);
      offspring[j] = std::move(out.second);
      if (out.exchanged.front()) std::swap(carried[i], carried[j]);
    }
  }

  for (auto& g : offspring) g = mutate(g, config_.q_m, rng_mutation_);

  const std::size_t elite = best_index();
  std::vector<Individual> next;
  if (config_.evaluate_before_selection) {
    auto evaluated = evaluate(std::move(offspring));
    std::vector<double> fit;
    fit.reserve(m);
    for (const auto& ind : evaluated) fit.push_back(ind.fitness);
    const auto picks = roulette_select(fitness_to_weights(fit), m, rng_selection_);
    next.reserve(m);
    for (auto i : picks) next.push_back(evaluated[i]);
    if (config_.elitism) next.front() = population_[elite];
  } else {
    const auto picks = roulette_select(fitness_to_weights(carried), m, rng_selection_);
    std::vector<BitGenome> survivors;
    survivors.reserve(m);
    for (auto i : picks) survivors.push_back(offspring[i]);
    // The elite is the unvaried best of the previous generation.
    if (config_.elitism) survivors.front() = population_[elite].genome;
    next = evaluate(std::move(survivors));
  }
  return record(std::move(next));
}

std::optional<TerminationReason> Engine::should_stop() const {
  if (failed_) return TerminationReason::kEvaluatorFailure;
  return check_stop(history_, config_);
}

RunReport Engine::run(const Observer& observer) {
  try {
    if (history_.empty()) {
      initialize();
      if (observer) observer(*this);
    }
    while (!should_stop()) {
      step();
      if (observer) observer(*this);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    failed_ = true;
    error_ = e.what();
  }
  return report();
}

RunReport Engine::report() const {
  RunReport r;
  r.config = config_;
  r.generations = history_;
  r.best = best_;
  r.total_evaluations = total_evaluations_;
  r.cache_hits = cache_ ? cache_->hits() : 0;
  r.failed_evaluations = failed_evaluations_;
  if (failed_) {
    r.termination = TerminationReason::kEvaluatorFailure;
    r.complete = false;
    r.error = error_;
  } else if (auto stop = check_stop(history_, config_)) {
    r.termination = *stop;
  }
  return r;
}

EngineState Engine::snapshot() const {
  EngineState s;
  s.population = population_;
  s.history = history_;
  s.best = best_;
  s.total_evaluations = total_evaluations_;
  s.failed_evaluations = failed_evaluations_;
  s.rng_pairing = rng_pairing_.save_state();
  s.rng_crossover = rng_crossover_.save_state();
  s.rng_mutation = rng_mutation_.save_state();
  s.rng_selection = rng_selection_.save_state();
  if (cache_) {
    s.cache_entries = cache_->entries();
    s.cache_hits = cache_->hits();
    s.cache_misses = cache_->misses();
  }
  return s;
}

RunReport run(const RunConfig& config, std::shared_ptr<Evaluator> evaluator,
              const Engine::Observer& observer) {
  Engine engine(config, std::move(evaluator));
  return engine.run(observer);
}

}  // namespace layerga
