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

#include "layerga/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "internal/text.hpp"
#include "layerga/error.hpp"

namespace layerga {

void FitnessParams::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be a finite value >= 0");
  }
}

double fitness(double accuracy, const Window& w, const FitnessParams& params) {
  return accuracy - params.gamma * static_cast<double>(w.l_end - w.l_start);
}

void validate_accuracy(double accuracy, const std::string& context) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw ValidationError(context + ": accuracy " + internal::format_double(accuracy) +
                          " outside [0, 1]");
  }
}

std::vector<EvalResponse> Evaluator::evaluate_batch(std::span<const EvalRequest> batch,
                                                    const BatchOptions& options) {
  std::vector<EvalResponse> out(batch.size());
  std::vector<std::exception_ptr> errors(batch.size());
  auto work = [&](std::size_t i) {
    try {
      const double acc = accuracy(batch[i].window);
      validate_accuracy(acc, describe() + " " + to_string(batch[i].window));
      out[i] = EvalResponse{batch[i].id, acc, {}};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  if (jobs == 1 || batch.size() < 2) {
    for (std::size_t i = 0; i < batch.size(); ++i) work(i);
  } else {
    const std::size_t n_threads = std::min(jobs, batch.size());
    std::vector<std::jthread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
      threads.emplace_back([&, t] {
        for (std::size_t i = t; i < batch.size(); i += n_threads) work(i);
      });
    }
  }
  // Rethrow the lowest-index failure so errors do not depend on scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic landscapes

SyntheticLandscape SyntheticLandscape::default_unimodal() {
  return unimodal(129.0, 151.0, 0.5, 0.47, 10.0);
}

SyntheticLandscape SyntheticLandscape::default_bimodal() {
  SyntheticLandscape land;
  land.kind = Kind::kBimodal;
  land.peaks = {{129.0, 151.0, 0.47}, {60.0, 90.0, 0.30}};
  land.base = 0.5;
  land.sigma = 10.0;
  return land;
}

SyntheticLandscape SyntheticLandscape::flat() { return unimodal(0.0, 0.0, 0.5, 0.0, 10.0); }

SyntheticLandscape SyntheticLandscape::unimodal(double center_start, double center_end,
                                                double base, double amplitude,
                                                double sigma) {
  SyntheticLandscape land;
  land.kind = Kind::kUnimodal;
  land.peaks = {{center_start, center_end, amplitude}};
  land.base = base;
  land.sigma = sigma;
  return land;
}

void SyntheticLandscape::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("landscape sigma must be > 0");
  if (!(base >= 0.0)) throw ConfigError("landscape base must be >= 0");
  if (peaks.empty()) throw ConfigError("landscape needs at least one peak");
  if (kind == Kind::kUnimodal && peaks.size() != 1) {
    throw ConfigError("unimodal landscape takes exactly one peak");
  }
  double max_amp = 0.0;
  for (const auto& p : peaks) {
    if (!(p.amplitude >= 0.0)) throw ConfigError("peak amplitude must be >= 0");
    max_amp = std::max(max_amp, p.amplitude);
  }
  if (base + max_amp > 1.0 + 1e-12) {
    throw ConfigError("landscape base + amplitude exceeds 1");
  }
}

double synthetic_accuracy(const Window& w, const SyntheticLandscape& land) {
  const double two_sigma_sq = 2.0 * land.sigma * land.sigma;
  double acc = land.base;
  for (const auto& p : land.peaks) {
    const double ds = w.l_start - p.center_start;
    const double de = w.l_end - p.center_end;
    acc += p.amplitude * std::exp(-(ds * ds + de * de) / two_sigma_sq);
  }
  return std::clamp(acc, 0.0, 1.0);
}

SyntheticEvaluator::SyntheticEvaluator(SyntheticLandscape land, std::string name)
    : land_(std::move(land)), name_(std::move(name)) {
  land_.validate();
}

// ---------------------------------------------------------------------------
// Lookup tables

double table_accuracy(const Window& w, const AccuracyTable& table) {
  auto it = table.entries.find(w);
  if (it == table.entries.end()) {
    throw MissingEntryError("accuracy table has no entry for window " + to_string(w));
  }
  return it->second;
}

AccuracyTable load_accuracy_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open accuracy table '" + path + "': file not found");

  AccuracyTable table;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = internal::trim(line);
    if (text.empty()) continue;
    if (!seen_header) {
      if (text != "l_start,l_end,accuracy") {
        throw ParseError("expected header 'l_start,l_end,accuracy'", line_no);
      }
      seen_header = true;
      continue;
    }
    auto fields = internal::split(text, ',');
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    auto s = internal::parse_number<int>(fields[0]);
    auto e = internal::parse_number<int>(fields[1]);
    auto acc = internal::parse_number<double>(fields[2]);
    if (!s || !e) throw ParseError("layer index is not an integer", line_no);
    if (!acc) throw ParseError("accuracy is not a number", line_no);
    const Window w{*s, *e};
    if (w.l_start < 0 || w.l_start > w.l_end) {
      throw ParseError("invalid window " + to_string(w), line_no);
    }
    if (!(*acc >= 0.0 && *acc <= 1.0)) {
      throw ParseError("accuracy outside [0, 1]", line_no);
    }
    if (!table.entries.emplace(w, *acc).second) {
      throw ParseError("duplicate window " + to_string(w), line_no);
    }
  }
  if (!seen_header) throw ParseError("missing header 'l_start,l_end,accuracy'", 1);
  return table;
}

void save_accuracy_table(const AccuracyTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "l_start,l_end,accuracy\n";
  for (const auto& [w, acc] : table.entries) {
    out << w.l_start << ',' << w.l_end << ',' << internal::format_double(acc) << '\n';
  }
}

TableEvaluator::TableEvaluator(AccuracyTable table, std::string name)
    : table_(std::move(table)), name_(std::move(name)) {}

std::optional<std::vector<Window>> TableEvaluator::domain() const {
  std::vector<Window> out;
  out.reserve(table_.entries.size());
  for (const auto& [w, acc] : table_.entries) out.push_back(w);
  return out;
}

// ---------------------------------------------------------------------------
// Cache

CachingEvaluator::CachingEvaluator(std::shared_ptr<Evaluator> inner)
    : inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("caching evaluator needs an inner evaluator");
  if (!inner_->deterministic()) {
    throw ConfigError("refusing to cache non-deterministic evaluator " + inner_->describe());
  }
}

std::optional<double> CachingEvaluator::lookup(const Window& w) const {
  std::lock_guard lock(mu_);
  auto it = cache_.find(w);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

void CachingEvaluator::store(const Window& w, double accuracy) {
  std::lock_guard lock(mu_);
  cache_.emplace(w, accuracy);
}

double CachingEvaluator::accuracy(const Window& w) {
  if (auto hit = lookup(w)) {
    ++hits_;
    return *hit;
  }
  ++misses_;
  const double acc = inner_->accuracy(w);
  validate_accuracy(acc, describe() + " " + to_string(w));
  store(w, acc);
  return acc;
}

std::vector<EvalResponse> CachingEvaluator::evaluate_batch(
    std::span<const EvalRequest> batch, const BatchOptions& options) {
  std::vector<EvalResponse> out(batch.size());
  // Windows that have to go to the inner evaluator, each once.
  std::vector<EvalRequest> misses;
  std::unordered_map<Window, std::size_t, WindowHash> miss_slot;
  std::vector<std::optional<std::size_t>> pending(batch.size());

  for (std::size_t i = 0; i < batch.size(); ++i) {
    out[i].id = batch[i].id;
    if (auto hit = lookup(batch[i].window)) {
      ++hits_;
      out[i].accuracy = *hit;
      continue;
    }
    auto [it, inserted] = miss_slot.emplace(batch[i].window, misses.size());
    if (inserted) {
      ++misses_;
      misses.push_back(EvalRequest{misses.size(), batch[i].window});
    } else {
      ++hits_;
    }
    pending[i] = it->second;
  }
  if (misses.empty()) return out;

  auto answers = inner_->evaluate_batch(misses, options);
  for (std::size_t k = 0; k < answers.size(); ++k) {
    if (answers[k].ok()) {
      validate_accuracy(*answers[k].accuracy, describe() + " " + to_string(misses[k].window));
      store(misses[k].window, *answers[k].accuracy);
    }
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!pending[i]) continue;
    const auto& a = answers[*pending[i]];
    out[i].accuracy = a.accuracy;
    out[i].error = a.error;
  }
  return out;
}

std::vector<std::pair<Window, double>> CachingEvaluator::entries() const {
  std::vector<std::pair<Window, double>> out;
  {
    std::lock_guard lock(mu_);
    out.assign(cache_.begin(), cache_.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CachingEvaluator::restore(std::span<const std::pair<Window, double>> entries,
                               std::uint64_t hits, std::uint64_t misses) {
  std::lock_guard lock(mu_);
  cache_.clear();
  for (const auto& [w, acc] : entries) cache_.emplace(w, acc);
  hits_ = hits;
  misses_ = misses;
}

}  // namespace layerga
