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

#include "layerga/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "internal/text.hpp"
#include "layerga/error.hpp"

namespace layerga {

std::vector<GradientRecord> parse_gradients(std::istream& in) {
  std::vector<GradientRecord> out;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = internal::trim(line);
    if (text.empty()) continue;
    if (!seen_header) {
      if (text != "layer,category,value") {
        throw ParseError("expected header 'layer,category,value'", line_no);
      }
      seen_header = true;
      continue;
    }
    auto fields = internal::split(text, ',');
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    auto layer = internal::parse_number<int>(fields[0]);
    auto category = internal::trim(fields[1]);
    auto value = internal::parse_number<double>(fields[2]);
    if (!layer) throw ParseError("layer is not an integer", line_no);
    if (*layer < 0) throw ParseError("layer must be >= 0", line_no);
    if (category.empty()) throw ParseError("empty category", line_no);
    if (!value || !std::isfinite(*value)) throw ParseError("value is not a number", line_no);
    out.push_back(GradientRecord{*layer, std::string(category), *value});
  }
  if (!seen_header) throw ParseError("missing header 'layer,category,value'", 1);
  return out;
}

std::vector<GradientRecord> load_gradients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gradient dump '" + path + "': file not found");
  return parse_gradients(in);
}

std::string to_string(Statistic stat) {
  switch (stat) {
    case Statistic::kMax:
      return "max";
    case Statistic::kMean:
      return "mean";
    case Statistic::kSum:
      return "sum";
  }
  return "unknown";
}

std::optional<Statistic> statistic_from_string(const std::string& text) {
  for (auto s : {Statistic::kMax, Statistic::kMean, Statistic::kSum}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

double LayerSummary::value(Statistic stat) const {
  switch (stat) {
    case Statistic::kMax:
      return max_value;
    case Statistic::kMean:
      return mean_value;
    case Statistic::kSum:
      return sum_value;
  }
  return 0.0;
}

std::vector<LayerSummary> summarize(std::span<const GradientRecord> records) {
  if (records.empty()) throw EmptyInputError("no gradient records to summarize");
  std::map<std::pair<int, std::string>, std::vector<double>> groups;
  for (const auto& r : records) groups[{r.layer, r.category}].push_back(r.value);

  std::vector<LayerSummary> out;
  out.reserve(groups.size());
  for (auto& [key, values] : groups) {
    std::sort(values.begin(), values.end());
    LayerSummary s;
    s.layer = key.first;
    s.category = key.second;
    s.count = values.size();
    s.max_value = values.back();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.sum_value = sum;
    s.mean_value = std::clamp(sum / static_cast<double>(values.size()), values.front(),
                              values.back());
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const LayerSummary> summaries) {
  out << "layer,category,max,mean,sum,count\n";
  for (const auto& s : summaries) {
    out << s.layer << ',' << s.category << ',' << internal::format_double(s.max_value) << ','
        << internal::format_double(s.mean_value) << ',' << internal::format_double(s.sum_value)
        << ',' << s.count << '\n';
  }
}

std::vector<std::string> categories(std::span<const LayerSummary> summaries) {
  std::set<std::string> seen;
  for (const auto& s : summaries) seen.insert(s.category);
  return {seen.begin(), seen.end()};
}

OppositionResult sign_opposition(std::span<const LayerSummary> summaries,
                                 const std::string& category_a,
                                 const std::string& category_b, double threshold) {
  if (!(threshold >= 0.0)) throw ConfigError("opposition threshold must be >= 0");
  const auto labels = categories(summaries);
  for (const auto* c : {&category_a, &category_b}) {
    if (!std::binary_search(labels.begin(), labels.end(), *c)) {
      std::string available;
      for (const auto& l : labels) available += (available.empty() ? "" : ", ") + l;
      throw Error("unknown category '" + *c + "'; available: " + available);
    }
  }

  std::map<int, std::pair<std::optional<double>, std::optional<double>>> by_layer;
  for (const auto& s : summaries) {
    auto& slot = by_layer[s.layer];
    if (s.category == category_a) slot.first = s.sum_value;
    if (s.category == category_b) slot.second = s.sum_value;
  }

  OppositionResult result;
  for (const auto& [layer, sums] : by_layer) {
    if (!sums.first || !sums.second) {
      result.skipped_layers.push_back(layer);
      continue;
    }
    const double a = *sums.first;
    const double b = *sums.second;
    const bool opposite = (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0);
    const bool strong = std::min(std::abs(a), std::abs(b)) >= threshold;
    result.findings.push_back(OppositionFinding{layer, a, b, opposite && strong});
  }
  return result;
}

void write_findings_jsonl(std::ostream& out, std::span<const OppositionFinding> findings) {
  for (const auto& f : findings) {
    nlohmann::ordered_json j;
    j["layer"] = f.layer;
    j["sum_a"] = f.sum_a;
    j["sum_b"] = f.sum_b;
    j["flagged"] = f.flagged;
    out << j.dump() << '\n';
  }
}

std::vector<LayerMagnitude> top_magnitude_layers(std::span<const LayerSummary> summaries,
                                                 Statistic stat, std::size_t k) {
  if (k == 0) throw ConfigError("k must be >= 1");
  std::map<int, double> magnitude;
  for (const auto& s : summaries) {
    auto [it, inserted] = magnitude.emplace(s.layer, std::abs(s.value(stat)));
    if (!inserted) it->second = std::max(it->second, std::abs(s.value(stat)));
  }
  std::vector<LayerMagnitude> out;
  out.reserve(magnitude.size());
  for (const auto& [layer, m] : magnitude) out.push_back(LayerMagnitude{layer, m});
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.magnitude != y.magnitude) return x.magnitude > y.magnitude;
    return x.layer < y.layer;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<int> layers_within(std::span<const LayerMagnitude> layers, const Window& w) {
  std::vector<int> out;
  for (const auto& l : layers) {
    if (l.layer >= w.l_start && l.layer <= w.l_end) out.push_back(l.layer);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace layerga
