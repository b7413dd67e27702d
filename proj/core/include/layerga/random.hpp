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

#ifndef LAYERGA_RANDOM_HPP_
#define LAYERGA_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace layerga {

// Source of raw 64-bit words. Operators draw through this interface so tests
// can substitute degenerate sources (all zeros, all ones).
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual std::uint64_t next_u64() = 0;
};

// Uniform double in [0, 1) built from the top 53 bits. Portable across
// standard libraries, unlike std::uniform_real_distribution.
double uniform01(RandomSource& rng);

// True with probability p. p <= 0 never fires, p >= 1 always fires.
bool bernoulli(RandomSource& rng, double p);

// A single fair bit taken from the most significant bit of the next word.
bool random_bit(RandomSource& rng);

// Uniform integer in [0, n). n must be > 0.
std::size_t uniform_index(RandomSource& rng, std::size_t n);

// Purposes that get their own independent stream, so that changing how often
// one stage draws never perturbs another.
enum class Stream : std::uint64_t {
  kInit = 1,
  kPairing = 2,
  kCrossover = 3,
  kMutation = 4,
  kSelection = 5,
};

class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed);

  // Deterministic child stream derived from (seed, stream id) via splitmix64.
  static Rng for_stream(std::uint64_t seed, Stream stream);

  std::uint64_t next_u64() override { return engine_(); }

  // Text snapshot of the full engine state, for checkpoints.
  std::string save_state() const;
  void restore_state(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace layerga

#endif  // LAYERGA_RANDOM_HPP_
