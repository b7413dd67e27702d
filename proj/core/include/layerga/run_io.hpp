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

#ifndef LAYERGA_RUN_IO_HPP_
#define LAYERGA_RUN_IO_HPP_

#include <ostream>
#include <span>
#include <string>

#include "layerga/engine.hpp"

namespace layerga {

inline constexpr const char* kGenerationsHeader = "gen,max,min,avg,best_l_start,best_l_end";

// generations.csv: one row per generation, accuracies to 4 decimals.
void write_generations_csv(std::ostream& out, std::span<const GenerationStats> history);
std::string generations_csv(std::span<const GenerationStats> history);

// population.jsonl: one record per individual of generation `gen`.
void append_population_jsonl(std::ostream& out, std::size_t gen,
                             std::span<const Individual> population);

// report.json. Execution-only settings (jobs) are left out so the bytes do
// not depend on how the run was scheduled.
std::string report_json(const RunReport& report);

// Checkpoint = resolved config + engine state, as JSON text.
std::string checkpoint_json(const RunConfig& config, const EngineState& state);

struct Checkpoint {
  RunConfig config;
  EngineState state;
};
// Throws ParseError on malformed input.
Checkpoint parse_checkpoint(const std::string& text);

// Small file helpers. Writes go through a temporary file and a rename so a
// crash never leaves a truncated checkpoint behind.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace layerga

#endif  // LAYERGA_RUN_IO_HPP_
