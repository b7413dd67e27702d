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

#ifndef LAYERGA_ANALYSIS_HPP_
#define LAYERGA_ANALYSIS_HPP_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "layerga/genome.hpp"

namespace layerga {

// One gradient observation of a single node.
struct GradientRecord {
  int layer = 0;
  std::string category;
  double value = 0.0;
};

// CSV `layer,category,value`. Throws ParseError naming the offending line.
std::vector<GradientRecord> load_gradients(const std::string& path);
std::vector<GradientRecord> parse_gradients(std::istream& in);

enum class Statistic { kMax, kMean, kSum };

std::string to_string(Statistic stat);
std::optional<Statistic> statistic_from_string(const std::string& text);

struct LayerSummary {
  int layer = 0;
  std::string category;
  double max_value = 0.0;
  double mean_value = 0.0;
  double sum_value = 0.0;
  std::size_t count = 0;

  double value(Statistic stat) const;
};

// Grouped by (layer, category) and sorted the same way, with max, mean and
// sum all filled in; pick one with LayerSummary::value. Values inside a
// group are summed in sorted order, so the result does not depend on input
// row order. Throws EmptyInputError on no records.
std::vector<LayerSummary> summarize(std::span<const GradientRecord> records);

// CSV `layer,category,max,mean,sum,count`.
void write_summary_csv(std::ostream& out, std::span<const LayerSummary> summaries);

struct OppositionFinding {
  int layer = 0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  bool flagged = false;
};

struct OppositionResult {
  std::vector<OppositionFinding> findings;  // every layer that has both categories
  std::vector<int> skipped_layers;          // layers missing one of them
};

// Flags a layer when the two category sums have strictly opposite signs and
// both magnitudes reach `threshold`. Throws Error listing the available
// labels when either category is unknown.
OppositionResult sign_opposition(std::span<const LayerSummary> summaries,
                                 const std::string& category_a,
                                 const std::string& category_b, double threshold = 0.0);

// {"layer":..,"sum_a":..,"sum_b":..,"flagged":..} per line.
void write_findings_jsonl(std::ostream& out, std::span<const OppositionFinding> findings);

struct LayerMagnitude {
  int layer = 0;
  double magnitude = 0.0;  // max over categories of |stat|
};

// The k layers with the largest magnitude, descending; ties go to the
// smaller layer index. Returns every layer when k exceeds the count.
std::vector<LayerMagnitude> top_magnitude_layers(std::span<const LayerSummary> summaries,
                                                 Statistic stat, std::size_t k);

// Layers from `layers` that fall inside the window (inclusive), ascending.
std::vector<int> layers_within(std::span<const LayerMagnitude> layers, const Window& w);

// Distinct category labels, sorted.
std::vector<std::string> categories(std::span<const LayerSummary> summaries);

}  // namespace layerga

#endif  // LAYERGA_ANALYSIS_HPP_
