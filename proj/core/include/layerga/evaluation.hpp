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

#ifndef LAYERGA_EVALUATION_HPP_
#define LAYERGA_EVALUATION_HPP_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "layerga/genome.hpp"

namespace layerga {

inline constexpr double kDefaultGamma = 0.005;

struct FitnessParams {
  double gamma = kDefaultGamma;  // penalty per layer of window span

  void validate() const;
};

// accuracy - gamma * (l_end - l_start). The span deliberately excludes the +1.
double fitness(double accuracy, const Window& w, const FitnessParams& params);

struct EvaluationResult {
  Window window;
  double accuracy = 0.0;
  double fitness = 0.0;
};

// Throws ValidationError if `accuracy` is not in [0, 1].
void validate_accuracy(double accuracy, const std::string& context);

struct EvalRequest {
  std::uint64_t id = 0;
  Window window;
};

// Either an accuracy or a per-request error message from the backend.
struct EvalResponse {
  std::uint64_t id = 0;
  std::optional<double> accuracy;
  std::string error;

  bool ok() const { return accuracy.has_value(); }
};

struct BatchOptions {
  int jobs = 1;  // upper bound on concurrent in-process evaluations
};

// Maps a window to a measured accuracy. Implementations must tolerate
// concurrent `accuracy` calls for distinct windows.
class Evaluator {
 public:
  virtual ~Evaluator() = default;

  // Throws on failure; never returns a value outside [0, 1].
  virtual double accuracy(const Window& w) = 0;

  virtual bool deterministic() const = 0;

  virtual std::string describe() const = 0;

  // Responses come back in request order. Hard failures (crashed worker,
  // missing table entry) throw; soft per-request failures are reported
  // through EvalResponse::error. The default fans `accuracy` out over
  // `options.jobs` threads.
  virtual std::vector<EvalResponse> evaluate_batch(std::span<const EvalRequest> batch,
                                                   const BatchOptions& options);

  // Finite set of windows the evaluator can answer, if it is restricted to
  // one (a lookup table). std::nullopt means every valid window.
  virtual std::optional<std::vector<Window>> domain() const { return std::nullopt; }
};

// Closed-form accuracy surface standing in for real training runs.
struct Peak {
  double center_start = 0.0;
  double center_end = 0.0;
  double amplitude = 0.0;
};

struct SyntheticLandscape {
  enum class Kind { kUnimodal, kBimodal };

  Kind kind = Kind::kUnimodal;
  std::vector<Peak> peaks;
  double base = 0.5;
  double sigma = 10.0;

  // Peak 0.97 at (129, 151) over a 0.5 floor, sigma 10.
  static SyntheticLandscape default_unimodal();
  // The unimodal peak plus a lower 0.8 mode at (60, 90).
  static SyntheticLandscape default_bimodal();
  // Constant 0.5.
  static SyntheticLandscape flat();
  static SyntheticLandscape unimodal(double center_start, double center_end,
                                     double base, double amplitude, double sigma);

  void validate() const;
};

double synthetic_accuracy(const Window& w, const SyntheticLandscape& land);

class SyntheticEvaluator final : public Evaluator {
 public:
  explicit SyntheticEvaluator(SyntheticLandscape land, std::string name = "synthetic");

  double accuracy(const Window& w) override { return synthetic_accuracy(w, land_); }
  bool deterministic() const override { return true; }
  std::string describe() const override { return name_; }
  const SyntheticLandscape& landscape() const { return land_; }

 private:
  SyntheticLandscape land_;
  std::string name_;
};

// Measured accuracies keyed by window.
struct AccuracyTable {
  std::map<Window, double> entries;
  bool deterministic = true;
};

// Exact-match lookup. Throws MissingEntryError naming the window.
double table_accuracy(const Window& w, const AccuracyTable& table);

// CSV with header `l_start,l_end,accuracy`. Throws ParseError with the line
// number on malformed rows, Error if the file cannot be opened.
AccuracyTable load_accuracy_table(const std::string& path);
void save_accuracy_table(const AccuracyTable& table, const std::string& path);

class TableEvaluator final : public Evaluator {
 public:
  explicit TableEvaluator(AccuracyTable table, std::string name = "table");

  double accuracy(const Window& w) override { return table_accuracy(w, table_); }
  bool deterministic() const override { return table_.deterministic; }
  std::string describe() const override { return name_; }
  std::optional<std::vector<Window>> domain() const override;

 private:
  AccuracyTable table_;
  std::string name_;
};

// Memoizes a deterministic evaluator by window. Errors are never cached.
// Concurrent misses on the same key may both reach the inner evaluator.
class CachingEvaluator final : public Evaluator {
 public:
  // Throws ConfigError if `inner` is not deterministic.
  explicit CachingEvaluator(std::shared_ptr<Evaluator> inner);

  double accuracy(const Window& w) override;
  bool deterministic() const override { return true; }
  std::string describe() const override { return inner_->describe(); }
  std::vector<EvalResponse> evaluate_batch(std::span<const EvalRequest> batch,
                                           const BatchOptions& options) override;
  std::optional<std::vector<Window>> domain() const override { return inner_->domain(); }

  std::uint64_t hits() const { return hits_.load(); }
  std::uint64_t misses() const { return misses_.load(); }

  // Snapshot / restore for checkpoints; entries come back sorted by window.
  std::vector<std::pair<Window, double>> entries() const;
  void restore(std::span<const std::pair<Window, double>> entries, std::uint64_t hits,
               std::uint64_t misses);

 private:
  std::optional<double> lookup(const Window& w) const;
  void store(const Window& w, double accuracy);

  std::shared_ptr<Evaluator> inner_;
  mutable std::mutex mu_;
  std::unordered_map<Window, double, WindowHash> cache_;
  std::atomic<std::uint64_t> hits_{0};
  std::atomic<std::uint64_t> misses_{0};
};

}  // namespace layerga

#endif  // LAYERGA_EVALUATION_HPP_
