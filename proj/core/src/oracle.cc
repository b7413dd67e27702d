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

#include "layerga/oracle.hpp"

#include <algorithm>

#include "internal/text.hpp"
#include "layerga/error.hpp"

namespace layerga {

std::uint64_t space_size(int l_max) {
  if (l_max < 0) return 0;
  const auto n = static_cast<std::uint64_t>(l_max) + 1;
  return n * (n + 1) / 2;
}

std::vector<Window> all_windows(int l_max) {
  std::vector<Window> out;
  out.reserve(space_size(l_max));
  for (int s = 0; s <= l_max; ++s) {
    for (int e = s; e <= l_max; ++e) out.push_back(Window{s, e});
  }
  return out;
}

OracleReport enumerate_best(Evaluator& evaluator, const OracleOptions& options) {
  if (!evaluator.deterministic()) {
    throw ConfigError("enumeration needs a deterministic evaluator; " + evaluator.describe() +
                      " declared itself non-deterministic");
  }
  const GenomeLayout layout{kDefaultBitsPerParam, options.l_max};
  if (options.l_max < 0) throw ConfigError("l_max must be >= 0");
  const FitnessParams fp{options.gamma};
  fp.validate();

  std::vector<Window> windows;
  if (auto domain = evaluator.domain()) {
    for (const auto& w : *domain) {
      if (layout.contains(w)) windows.push_back(w);
    }
    std::sort(windows.begin(), windows.end());
  } else {
    windows = all_windows(options.l_max);
  }
  if (windows.empty()) throw EmptyInputError("no windows to enumerate");

  std::vector<EvalRequest> batch;
  batch.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) batch.push_back(EvalRequest{i, windows[i]});

  std::vector<EvalResponse> answers;
  try {
    answers = evaluator.evaluate_batch(batch, BatchOptions{options.jobs});
  } catch (const Error& e) {
    throw EvaluatorFailure(std::string("enumeration aborted: ") + e.what());
  }

  OracleReport report;
  report.enumerated = windows.size();
  if (options.keep_table) report.table.reserve(windows.size());
  bool have_best = false;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!answers[i].ok()) {
      throw EvaluatorFailure("enumeration aborted at window " + to_string(windows[i]) + ": " +
                             answers[i].error);
    }
    const double acc = *answers[i].accuracy;
    const EvaluationResult r{windows[i], acc, fitness(acc, windows[i], fp)};
    // Windows arrive in lexicographic order, so strict > keeps the smallest.
    if (!have_best || r.fitness > report.best.fitness) {
      report.best = r;
      have_best = true;
    }
    if (options.keep_table) report.table.push_back(r);
  }
  return report;
}

void write_oracle_table(std::ostream& out, const std::vector<EvaluationResult>& table) {
  out << "l_start,l_end,accuracy,fitness\n";
  for (const auto& r : table) {
    out << r.window.l_start << ',' << r.window.l_end << ','
        << internal::format_double(r.accuracy) << ',' << internal::format_double(r.fitness)
        << '\n';
  }
}

}  // namespace layerga
