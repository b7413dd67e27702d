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

#include "layerga/genome.hpp"

#include <algorithm>

#include "layerga/error.hpp"

namespace layerga {

std::string to_string(const Window& w) {
  return "(" + std::to_string(w.l_start) + "," + std::to_string(w.l_end) + ")";
}

void GenomeLayout::validate() const {
  if (bits_per_param < 1 || bits_per_param > 30) {
    throw ConfigError("bits_per_param must be in [1, 30], got " +
                      std::to_string(bits_per_param));
  }
  if (l_max < 0) throw ConfigError("l_max must be >= 0");
  if ((1L << bits_per_param) <= l_max) {
    throw ConfigError("l_max " + std::to_string(l_max) + " does not fit in " +
                      std::to_string(bits_per_param) + " bits");
  }
}

BitGenome::BitGenome(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw MalformedGenomeError("genome bit must be 0 or 1");
  }
}

BitGenome BitGenome::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw MalformedGenomeError("genome text may only contain '0' and '1': \"" +
                                 std::string(text) + "\"");
    }
    bits.push_back(c == '1' ? 1 : 0);
  }
  return BitGenome(std::move(bits));
}

std::string BitGenome::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out[i] = '1';
  }
  return out;
}

BitGenome random_genome(RandomSource& rng, const GenomeLayout& layout) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(layout.total_bits()));
  for (auto& b : bits) b = random_bit(rng) ? 1 : 0;
  return BitGenome(std::move(bits));
}

std::pair<int, int> decode_raw(const BitGenome& g, const GenomeLayout& layout) {
  const auto width = static_cast<std::size_t>(layout.bits_per_param);
  if (g.size() != width * kNumParams) {
    throw MalformedGenomeError("genome has " + std::to_string(g.size()) +
                               " bits, layout expects " +
                               std::to_string(width * kNumParams));
  }
  auto block = [&](std::size_t offset) {
    int value = 0;
    for (std::size_t i = 0; i < width; ++i) value = (value << 1) | (g[offset + i] ? 1 : 0);
    return value;
  };
  return {block(0), block(width)};
}

Window repair(int raw_start, int raw_end, const GenomeLayout& layout) {
  int s = std::clamp(raw_start, 0, layout.l_max);
  int e = std::clamp(raw_end, 0, layout.l_max);
  if (s > e) std::swap(s, e);
  return Window{s, e};
}

BitGenome encode(const Window& w, const GenomeLayout& layout) {
  if (!layout.contains(w)) {
    throw OutOfRangeError("window " + to_string(w) + " outside [0, " +
                          std::to_string(layout.l_max) + "]");
  }
  const auto width = static_cast<std::size_t>(layout.bits_per_param);
  std::vector<std::uint8_t> bits(width * kNumParams);
  auto put = [&](std::size_t offset, int value) {
    for (std::size_t i = 0; i < width; ++i) {
      bits[offset + i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1);
    }
  };
  put(0, w.l_start);
  put(width, w.l_end);
  return BitGenome(std::move(bits));
}

}  // namespace layerga
