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

#ifndef LAYERGA_ORACLE_HPP_
#define LAYERGA_ORACLE_HPP_

#include <cstdint>
#include <ostream>
#include <vector>

#include "layerga/evaluation.hpp"
#include "layerga/genome.hpp"

namespace layerga {

// Number of windows with 0 <= l_start <= l_end <= l_max.
std::uint64_t space_size(int l_max);

// Every window with 0 <= l_start <= l_end <= l_max, lexicographic order.
std::vector<Window> all_windows(int l_max);

struct OracleReport {
  EvaluationResult best;
  std::uint64_t enumerated = 0;
  std::vector<EvaluationResult> table;  // filled only when requested
};

struct OracleOptions {
  double gamma = kDefaultGamma;
  int l_max = kDefaultLMax;
  bool keep_table = false;
  int jobs = 1;
};

// Exhaustive search for the fitness argmax. Evaluators with a finite
// domain() are enumerated over that domain (restricted to l_max); all
// others over the full window space. Ties go to the lexicographically
// smallest window.
//
// Throws ConfigError for non-deterministic evaluators and EvaluatorFailure
// when any evaluation fails; error responses name their window.
OracleReport enumerate_best(Evaluator& evaluator, const OracleOptions& options);

// CSV `l_start,l_end,accuracy,fitness`.
void write_oracle_table(std::ostream& out, const std::vector<EvaluationResult>& table);

}  // namespace layerga

#endif  // LAYERGA_ORACLE_HPP_
