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

#include "layerga/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "layerga/error.hpp"

namespace layerga {

void OperatorParams::validate() const {
  if (!(q_m >= 0.0 && q_m <= 1.0)) {
    throw ConfigError("q_m must be in [0, 1], got " + std::to_string(q_m));
  }
  if (!(q_c >= 0.0 && q_c <= 1.0)) {
    throw ConfigError("q_c must be in [0, 1], got " + std::to_string(q_c));
  }
}

BitGenome mutate(const BitGenome& g, double q_m, RandomSource& rng) {
  BitGenome out = g;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (bernoulli(rng, q_m)) out.flip(i);
  }
  return out;
}

CrossoverOutcome crossover(const BitGenome& a, const BitGenome& b, double q_c,
                           RandomSource& rng, const GenomeLayout& layout) {
  const auto width = static_cast<std::size_t>(layout.bits_per_param);
  if (a.size() != b.size() || a.size() != width * kNumParams) {
    throw MalformedGenomeError("crossover needs two genomes of " +
                               std::to_string(width * kNumParams) + " bits, got " +
                               std::to_string(a.size()) + " and " +
                               std::to_string(b.size()));
  }
  CrossoverOutcome out{a, b, std::vector<bool>(kNumParams, false)};
  for (std::size_t block = 0; block < kNumParams; ++block) {
    if (!bernoulli(rng, q_c)) continue;
    out.exchanged[block] = true;
    for (std::size_t i = block * width; i < (block + 1) * width; ++i) {
      out.first.set(i, b[i]);
      out.second.set(i, a[i]);
    }
  }
  return out;
}

Pairing pair_population(std::size_t n, RandomSource& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  Pairing out;
  out.pairs.reserve(n / 2);
  for (std::size_t i = 0; i + 1 < n; i += 2) out.pairs.emplace_back(order[i], order[i + 1]);
  if (n % 2 == 1) out.unpaired = order.back();
  return out;
}

SelectionWeights SelectionWeights::from_fitness(std::span<const double> fitness) {
  if (fitness.empty()) throw EmptyPopulationError("no fitness values to weight");
  SelectionWeights w;
  w.probs_.assign(fitness.begin(), fitness.end());
  const double lo = *std::min_element(w.probs_.begin(), w.probs_.end());
  if (!(lo > 0.0)) {
    const double offset = -lo + kShiftEpsilon;
    for (auto& v : w.probs_) v += offset;
    w.shifted_ = true;
  }
  const double total = std::accumulate(w.probs_.begin(), w.probs_.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InternalError("selection weights do not sum to a positive value");
  }
  for (auto& v : w.probs_) v /= total;
  return w;
}

std::vector<std::size_t> roulette_select(const SelectionWeights& weights,
                                         std::size_t m, RandomSource& rng) {
  if (m == 0) throw EmptyPopulationError("cannot select an empty population");
  if (weights.size() == 0) throw EmptyPopulationError("no individuals to select from");
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.probabilities().begin(), weights.probabilities().end(),
                   cumulative.begin());
  std::vector<std::size_t> picks;
  picks.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = uniform01(rng) * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    // Rounding can leave u at the very top; fall back to the last live entry.
    if (idx >= weights.size()) idx = weights.size() - 1;
    while (weights[idx] == 0.0 && idx > 0) --idx;
    picks.push_back(idx);
  }
  return picks;
}

}  // namespace layerga
