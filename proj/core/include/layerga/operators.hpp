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

#ifndef LAYERGA_OPERATORS_HPP_
#define LAYERGA_OPERATORS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "layerga/genome.hpp"
#include "layerga/random.hpp"

namespace layerga {

inline constexpr double kDefaultMutationProb = 0.05;
inline constexpr double kDefaultCrossoverProb = 0.2;
// Offset added on top of the minimum when fitness values are shifted.
inline constexpr double kShiftEpsilon = 1e-6;

struct OperatorParams {
  double q_m = kDefaultMutationProb;
  double q_c = kDefaultCrossoverProb;
  bool elitism = false;

  void validate() const;
};

// Flips every bit independently with probability q_m.
BitGenome mutate(const BitGenome& g, double q_m, RandomSource& rng);

// Which parameter blocks were swapped by a crossover.
struct CrossoverOutcome {
  BitGenome first;
  BitGenome second;
  std::vector<bool> exchanged;  // one flag per parameter block
};

// Exchanges each corresponding parameter block of `a` and `b` with
// probability q_c. Throws MalformedGenomeError on length mismatch.
CrossoverOutcome crossover(const BitGenome& a, const BitGenome& b, double q_c,
                           RandomSource& rng, const GenomeLayout& layout);

struct Pairing {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::optional<std::size_t> unpaired;
};

// Shuffles indices [0, n) and pairs neighbours; an odd one out passes through.
Pairing pair_population(std::size_t n, RandomSource& rng);

// In-place Fisher-Yates with our own index draw (std::shuffle is not
// specified bit-for-bit across standard libraries).
template <typename T>
void shuffle(std::vector<T>& items, RandomSource& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

// Normalized roulette probabilities. Strictly positive inputs are divided by
// their sum; otherwise everything is first shifted by (-min + kShiftEpsilon).
class SelectionWeights {
 public:
  static SelectionWeights from_fitness(std::span<const double> fitness);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probabilities() const { return probs_; }
  bool shifted() const { return shifted_; }

 private:
  std::vector<double> probs_;
  bool shifted_ = false;
};

inline SelectionWeights fitness_to_weights(std::span<const double> fitness) {
  return SelectionWeights::from_fitness(fitness);
}

// m independent roulette draws with replacement. Throws EmptyPopulationError
// when m == 0 or there is nothing to draw from.
std::vector<std::size_t> roulette_select(const SelectionWeights& weights,
                                         std::size_t m, RandomSource& rng);

// Draws m survivors from `pop`. With elitism the highest-weight individual
// (lowest index on ties) overwrites the first draw.
template <typename T>
std::vector<T> select(std::span<const T> pop, const SelectionWeights& weights,
                      std::size_t m, RandomSource& rng, bool elitism = false) {
  auto picks = roulette_select(weights, m, rng);
  if (elitism) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < weights.size(); ++i) {
      if (weights[i] > weights[best]) best = i;
    }
    picks.front() = best;
  }
  std::vector<T> out;
  out.reserve(m);
  for (auto i : picks) out.push_back(pop[i]);
  return out;
}

}  // namespace layerga

#endif  // LAYERGA_OPERATORS_HPP_
