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

#ifndef LAYERGA_EXTERNAL_EVALUATOR_HPP_
#define LAYERGA_EXTERNAL_EVALUATOR_HPP_

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <sys/types.h>
#include <vector>

#include "layerga/evaluation.hpp"

namespace layerga {

inline constexpr const char* kProtocolName = "layerga-eval/1";

struct ExternalOptions {
  // Longest wait for any single line from the worker; zero waits forever.
  std::chrono::milliseconds read_timeout{0};
  // Grace period for the worker to exit after its input is closed.
  std::chrono::milliseconds exit_timeout{5000};
};

// Wire format helpers, exposed for tests and for alternative transports.
std::string format_request(std::uint64_t id, const Window& w);

struct Handshake {
  std::string protocol;
  bool deterministic = false;
};
// Throws ProtocolError unless the line is a valid layerga-eval/1 handshake.
Handshake parse_handshake(const std::string& line);

// Throws ProtocolError on anything but {"id":n,"accuracy":x} or
// {"id":n,"error":"..."}. The accuracy range is not checked here.
EvalResponse parse_response(const std::string& line);

// Runs `/bin/sh -c <command>` as a worker speaking layerga-eval/1 over its
// standard input and output. One batch is in flight at a time; responses
// are matched to requests by id, so the worker may answer out of order.
class ExternalEvaluator final : public Evaluator {
 public:
  // Spawns the worker and reads its handshake. Throws EvaluatorFailure if
  // the worker cannot be started or exits first, ProtocolError on a bad
  // handshake.
  explicit ExternalEvaluator(std::string command, ExternalOptions options = {});
  ~ExternalEvaluator() override;

  ExternalEvaluator(const ExternalEvaluator&) = delete;
  ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

  // Throws EvaluatorFailure when the worker reports an error for the window.
  double accuracy(const Window& w) override;
  bool deterministic() const override { return handshake_.deterministic; }
  std::string describe() const override { return "external:" + command_; }
  std::vector<EvalResponse> evaluate_batch(std::span<const EvalRequest> batch,
                                           const BatchOptions& options) override;

  // Closes the worker's input, drains what it still writes, and reaps it.
  // Returns the exit status (or 128 + signal). Idempotent.
  int shutdown();

 private:
  std::optional<std::string> read_line();
  void write_all(const std::string& data);

  std::string command_;
  ExternalOptions options_;
  Handshake handshake_;
  pid_t pid_ = -1;
  int to_worker_ = -1;
  int from_worker_ = -1;
  std::string buffer_;
  std::uint64_t next_id_ = 0;
  std::optional<int> exit_status_;
  std::mutex mu_;
};

}  // namespace layerga

#endif  // LAYERGA_EXTERNAL_EVALUATOR_HPP_
