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

#include <gtest/gtest.h>

#include <memory>
#include <set>

#include "layerga/error.hpp"
#include "layerga/external_evaluator.hpp"
#include "layerga/oracle.hpp"
#include "support/test_util.hpp"

namespace layerga {
namespace {

using testing::CountingEvaluator;

std::shared_ptr<Evaluator> unimodal() {
  return std::make_shared<SyntheticEvaluator>(SyntheticLandscape::default_unimodal());
}

RunConfig small_config(std::uint64_t seed = 3) {
  RunConfig c;
  c.population_size = 20;
  c.max_generations = 8;
  c.seed = seed;
  return c;
}

Individual make(double acc, Window w) {
  Individual ind;
  ind.window = w;
  ind.genome = encode(w, GenomeLayout{});
  ind.accuracy = acc;
  ind.fitness = fitness(acc, w, FitnessParams{});
  return ind;
}

void expect_same_generations(const RunReport& a, const RunReport& b) {
  ASSERT_EQ(a.generations.size(), b.generations.size());
  for (std::size_t g = 0; g < a.generations.size(); ++g) {
    const auto& x = a.generations[g];
    const auto& y = b.generations[g];
    EXPECT_EQ(x.max_acc, y.max_acc);
    EXPECT_EQ(x.min_acc, y.min_acc);
    EXPECT_EQ(x.avg_acc, y.avg_acc);
    EXPECT_EQ(x.best_window, y.best_window);
  }
  ASSERT_TRUE(a.best && b.best);
  EXPECT_EQ(a.best->genome, b.best->genome);
}

void expect_same(const RunReport& a, const RunReport& b) {
  expect_same_generations(a, b);
  EXPECT_EQ(a.total_evaluations, b.total_evaluations);
  EXPECT_EQ(a.cache_hits, b.cache_hits);
}

TEST(RunConfigTest, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.population_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.max_generations = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.q_m = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.q_c = -0.1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.jobs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.l_max = 300;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ComputeStatsTest, FourIndividuals) {
  const std::vector<Individual> pop{make(0.92, {131, 133}), make(0.47, {0, 156}),
                                    make(0.80, {10, 40}), make(0.85, {140, 150})};
  const auto s = compute_stats(pop, 1);
  EXPECT_EQ(s.generation, 1u);
  EXPECT_NEAR(s.max_acc, 0.92, 1e-12);
  EXPECT_NEAR(s.min_acc, 0.47, 1e-12);
  EXPECT_NEAR(s.avg_acc, 0.76, 1e-12);
  EXPECT_EQ(s.best_window, (Window{131, 133}));
  EXPECT_NEAR(s.best_fitness, 0.91, 1e-12);
}

TEST(ComputeStatsTest, IdenticalPopulation) {
  const std::vector<Individual> pop(7, make(0.8123456789, {12, 99}));
  const auto s = compute_stats(pop, 4);
  EXPECT_EQ(s.max_acc, s.min_acc);
  EXPECT_EQ(s.avg_acc, s.max_acc);
}

TEST(ComputeStatsTest, BestIsByFitnessNotAccuracy) {
  // Higher accuracy but a much wider window.
  const std::vector<Individual> pop{make(0.95, {0, 156}), make(0.90, {100, 101})};
  EXPECT_EQ(compute_stats(pop, 1).best_window, (Window{100, 101}));
}

TEST(ComputeStatsTest, EmptyPopulation) {
  EXPECT_THROW(compute_stats(std::vector<Individual>{}, 1), EmptyPopulationError);
}

std::vector<GenerationStats> history_of(std::initializer_list<double> best) {
  std::vector<GenerationStats> h;
  for (double f : best) {
    GenerationStats s;
    s.generation = h.size() + 1;
    s.best_fitness = f;
    h.push_back(s);
  }
  return h;
}

TEST(CheckStopTest, StopsAtGenerationLimit) {
  RunConfig c;
  c.max_generations = 3;
  EXPECT_FALSE(check_stop(history_of({0.1, 0.2}), c));
  EXPECT_EQ(check_stop(history_of({0.1, 0.2, 0.3}), c), TerminationReason::kMaxGenerations);
}

TEST(CheckStopTest, StrictImprovementContinues) {
  RunConfig c;
  c.max_generations = 100;
  c.stagnation_window = 3;
  EXPECT_FALSE(check_stop(history_of({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}), c));
}

TEST(CheckStopTest, FlatForWindowStops) {
  RunConfig c;
  c.max_generations = 100;
  c.stagnation_window = 3;
  EXPECT_FALSE(check_stop(history_of({0.1, 0.5, 0.5, 0.5}), c));
  EXPECT_EQ(check_stop(history_of({0.1, 0.5, 0.5, 0.5, 0.5}), c),
            TerminationReason::kStagnation);
  // A dip and recovery to the same value is not an improvement.
  EXPECT_EQ(check_stop(history_of({0.5, 0.4, 0.5, 0.3}), c), TerminationReason::kStagnation);
}

TEST(CheckStopTest, DisabledByDefault) {
  RunConfig c;
  c.max_generations = 100;
  EXPECT_FALSE(check_stop(history_of({0.5, 0.5, 0.5, 0.5, 0.5, 0.5}), c));
}

TEST(EngineTest, SingleIndividualSingleGeneration) {
  RunConfig c;
  c.population_size = 1;
  c.max_generations = 1;
  c.seed = 11;
  const auto r = run(c, unimodal());
  ASSERT_EQ(r.generations.size(), 1u);
  ASSERT_TRUE(r.best);
  EXPECT_EQ(r.generations[0].best_window, r.best->window);
  EXPECT_EQ(r.generations[0].max_acc, r.best->accuracy);
  EXPECT_EQ(r.termination, TerminationReason::kMaxGenerations);
  EXPECT_TRUE(r.complete);
}

TEST(EngineTest, SingleIndividualManyGenerations) {
  RunConfig c;
  c.population_size = 1;
  c.max_generations = 5;
  const auto r = run(c, unimodal());
  EXPECT_EQ(r.generations.size(), 5u);
}

TEST(EngineTest, SameSeedSameReport) {
  expect_same(run(small_config(), unimodal()), run(small_config(), unimodal()));
}

TEST(EngineTest, DifferentSeedsDiffer) {
  const auto a = run(small_config(1), unimodal());
  const auto b = run(small_config(2), unimodal());
  bool differs = false;
  for (std::size_t g = 0; g < a.generations.size(); ++g) {
    differs |= a.generations[g].avg_acc != b.generations[g].avg_acc;
  }
  EXPECT_TRUE(differs);
}

TEST(EngineTest, JobsDoNotChangeResults) {
  auto c = small_config(5);
  const auto one = run(c, unimodal());
  c.jobs = 4;
  expect_same(one, run(c, unimodal()));
}

TEST(EngineTest, CacheDoesNotChangeResults) {
  auto c = small_config(6);
  const auto cached = run(c, unimodal());
  c.cache = false;
  const auto plain = run(c, unimodal());
  ASSERT_EQ(cached.generations.size(), plain.generations.size());
  for (std::size_t g = 0; g < plain.generations.size(); ++g) {
    EXPECT_EQ(cached.generations[g].avg_acc, plain.generations[g].avg_acc);
  }
  EXPECT_EQ(plain.cache_hits, 0u);
  EXPECT_GT(cached.cache_hits, 0u);
}

TEST(EngineTest, EvaluationCountIsPopulationTimesGenerations) {
  const auto c = small_config();
  const auto r = run(c, unimodal());
  EXPECT_EQ(r.total_evaluations, c.population_size * c.max_generations);
}

TEST(EngineTest, PopulationInvariants) {
  auto c = small_config(9);
  c.population_size = 13;
  c.max_generations = 12;
  c.q_m = 0.3;
  c.q_c = 0.8;
  c.l_max = 40;
  Engine e(c, unimodal());
  const auto check = [&](const Engine& eng) {
    ASSERT_EQ(eng.population().size(), c.population_size);
    for (const auto& ind : eng.population()) {
      EXPECT_TRUE(c.layout().contains(ind.window));
      EXPECT_EQ(decode(ind.genome, c.layout()), ind.window);
      EXPECT_EQ(ind.fitness, fitness(ind.accuracy, ind.window, c.fitness_params()));
    }
    const auto& s = eng.history().back();
    EXPECT_LE(s.min_acc, s.avg_acc);
    EXPECT_LE(s.avg_acc, s.max_acc);
  };
  e.run(check);
  EXPECT_EQ(e.history().size(), c.max_generations);
}

TEST(EngineTest, NoVariationResamplesCurrentPopulation) {
  auto c = small_config(4);
  c.q_m = 0.0;
  c.q_c = 0.0;
  Engine e(c, std::make_shared<SyntheticEvaluator>(SyntheticLandscape::flat()));
  e.initialize();
  std::set<std::string> before;
  for (const auto& ind : e.population()) before.insert(ind.genome.to_string());
  e.step();
  for (const auto& ind : e.population()) {
    EXPECT_TRUE(before.count(ind.genome.to_string())) << ind.genome.to_string();
  }
}

TEST(EngineTest, ElitismKeepsBestMonotone) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = small_config(seed);
    c.elitism = true;
    c.q_m = 0.2;
    c.max_generations = 15;
    const auto r = run(c, unimodal());
    for (std::size_t g = 1; g < r.generations.size(); ++g) {
      EXPECT_GE(r.generations[g].best_fitness, r.generations[g - 1].best_fitness)
          << "seed " << seed << " gen " << g + 1;
    }
  }
}

TEST(EngineTest, EvaluateBeforeSelectionRuns) {
  auto c = small_config(8);
  c.evaluate_before_selection = true;
  c.elitism = true;
  const auto r = run(c, unimodal());
  EXPECT_EQ(r.generations.size(), c.max_generations);
  for (std::size_t g = 1; g < r.generations.size(); ++g) {
    EXPECT_GE(r.generations[g].best_fitness, r.generations[g - 1].best_fitness);
  }
}

TEST(EngineTest, StagnationEndsRunEarly) {
  auto c = small_config();
  c.max_generations = 50;
  c.stagnation_window = 2;
  const auto r = run(c, std::make_shared<SyntheticEvaluator>(SyntheticLandscape::flat()));
  EXPECT_EQ(r.termination, TerminationReason::kStagnation);
  EXPECT_LT(r.generations.size(), 50u);
}

TEST(EngineTest, BestNeverBeatsOracle) {
  auto c = small_config(12);
  c.l_max = 30;
  auto ev = std::make_shared<SyntheticEvaluator>(
      SyntheticLandscape::unimodal(25, 29, 0.5, 0.47, 2.0));
  const auto oracle = enumerate_best(*ev, OracleOptions{c.gamma, c.l_max});
  const auto r = run(c, ev);
  EXPECT_LE(r.best->fitness, oracle.best.fitness + 1e-12);
}

TEST(EngineTest, ResumeMatchesUninterruptedRun) {
  auto c = small_config(21);
  c.max_generations = 10;
  const auto full = run(c, unimodal());

  Engine first(c, unimodal());
  first.initialize();
  for (int i = 0; i < 3; ++i) first.step();
  const auto state = first.snapshot();

  auto resumed = Engine::resume(c, unimodal(), state);
  expect_same(full, resumed.run());
}

TEST(EngineTest, ResumeRejectsMismatchedPopulation) {
  auto c = small_config();
  Engine e(c, unimodal());
  e.initialize();
  auto state = e.snapshot();
  c.population_size = 21;
  EXPECT_THROW(Engine::resume(c, unimodal(), state), ConfigError);
}

TEST(EngineTest, StepBeforeInitializeIsInternalError) {
  Engine e(small_config(), unimodal());
  EXPECT_THROW(e.step(), InternalError);
}

TEST(EngineTest, MissingEvaluatorRejected) {
  EXPECT_THROW(Engine(small_config(), nullptr), ConfigError);
}

std::string worker(const std::string& flags) {
  return std::string(LAYERGA_FAKE_WORKER) + " " + flags;
}

TEST(EngineTest, TransientErrorIsRetried) {
  // The worker fails the first request for any window starting at the given
  // layer, then succeeds.
  auto c = small_config(2);
  c.max_generations = 3;
  const auto baseline = run(c, unimodal());
  const int l_start = baseline.generations[0].best_window.l_start;
  const auto r = run(c, std::make_shared<ExternalEvaluator>(
                            worker("--flaky-id " + std::to_string(l_start))));
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.failed_evaluations, 0u);
  EXPECT_GT(r.total_evaluations, baseline.total_evaluations);
  expect_same_generations(baseline, r);
}

TEST(EngineTest, PersistentErrorScoresZero) {
  auto c = small_config(2);
  c.max_generations = 1;
  c.cache = false;
  // With one retry, wire ids 0..19 are the first attempt and the single
  // failed request is retried as wire id 20.
  auto ev = std::make_shared<ExternalEvaluator>(worker("--error-id 4 --error-id 20"));
  const auto r = run(c, ev);
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(r.failed_evaluations, 1u);
  EXPECT_EQ(r.total_evaluations, 21u);
  EXPECT_EQ(r.generations[0].min_acc, 0.0);
}

TEST(EngineTest, HardFailureGivesIncompleteReport) {
  auto c = small_config(2);
  c.max_generations = 5;
  c.cache = false;
  auto ev = std::make_shared<ExternalEvaluator>(worker("--exit-after 50"));
  const auto r = run(c, ev);
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(r.termination, TerminationReason::kEvaluatorFailure);
  EXPECT_EQ(r.generations.size(), 2u);
  EXPECT_FALSE(r.error.empty());
}

}  // namespace
}  // namespace layerga
