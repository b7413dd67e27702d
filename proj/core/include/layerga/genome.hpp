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

#ifndef LAYERGA_GENOME_HPP_
#define LAYERGA_GENOME_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layerga/random.hpp"

namespace layerga {

inline constexpr int kDefaultLMax = 156;
inline constexpr int kDefaultBitsPerParam = 8;
// Two parameters are encoded: the first and the last trainable layer.
inline constexpr int kNumParams = 2;

// Contiguous block of trainable layers, both ends inclusive.
struct Window {
  int l_start = 0;
  int l_end = 0;

  int span() const { return l_end - l_start; }
  friend auto operator<=>(const Window&, const Window&) = default;
};

std::string to_string(const Window& w);

struct WindowHash {
  std::size_t operator()(const Window& w) const noexcept {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(w.l_start)) << 32) |
        static_cast<std::uint32_t>(w.l_end));
  }
};

// How a window is laid out in bits: `bits_per_param` bits for l_start
// followed by the same for l_end, each block most significant bit first.
struct GenomeLayout {
  int bits_per_param = kDefaultBitsPerParam;
  int l_max = kDefaultLMax;

  int total_bits() const { return bits_per_param * kNumParams; }
  int raw_max() const { return (1 << bits_per_param) - 1; }

  // Throws ConfigError unless 2^bits_per_param > l_max >= 0.
  void validate() const;
  bool contains(const Window& w) const {
    return 0 <= w.l_start && w.l_start <= w.l_end && w.l_end <= l_max;
  }
};

class BitGenome {
 public:
  BitGenome() = default;
  explicit BitGenome(std::vector<std::uint8_t> bits);

  // Parses a string of '0'/'1'. Any other character is a MalformedGenomeError.
  static BitGenome from_string(std::string_view text);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  std::string to_string() const;

  friend bool operator==(const BitGenome&, const BitGenome&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

BitGenome random_genome(RandomSource& rng, const GenomeLayout& layout);

// Reads both blocks as unsigned integers without clamping.
std::pair<int, int> decode_raw(const BitGenome& g, const GenomeLayout& layout);

// Clamp each bound to [0, l_max], then order them. Idempotent.
Window repair(int raw_start, int raw_end, const GenomeLayout& layout);

inline Window decode(const BitGenome& g, const GenomeLayout& layout) {
  auto [s, e] = decode_raw(g, layout);
  return repair(s, e, layout);
}

BitGenome encode(const Window& w, const GenomeLayout& layout);

}  // namespace layerga

#endif  // LAYERGA_GENOME_HPP_
