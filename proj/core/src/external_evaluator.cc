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

#include "layerga/external_evaluator.hpp"

#include <cerrno>
#include <cstring>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "layerga/error.hpp"

extern char** environ;

namespace layerga {

namespace {

using nlohmann::json;

std::string errno_text() { return std::strerror(errno); }

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace

std::string format_request(std::uint64_t id, const Window& w) {
  json j;
  j["id"] = id;
  j["l_start"] = w.l_start;
  j["l_end"] = w.l_end;
  return j.dump();
}

Handshake parse_handshake(const std::string& line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("handshake is not a JSON object: " + line);
  }
  auto proto = j.find("protocol");
  auto det = j.find("deterministic");
  if (proto == j.end() || !proto->is_string()) {
    throw ProtocolError("handshake lacks a \"protocol\" string: " + line);
  }
  if (proto->get<std::string>() != kProtocolName) {
    throw ProtocolError("unsupported protocol \"" + proto->get<std::string>() +
                        "\", expected " + kProtocolName);
  }
  if (det == j.end() || !det->is_boolean()) {
    throw ProtocolError("handshake lacks a boolean \"deterministic\": " + line);
  }
  return Handshake{proto->get<std::string>(), det->get<bool>()};
}

EvalResponse parse_response(const std::string& line) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProtocolError("response is not a JSON object: " + line);
  }
  auto id = j.find("id");
  if (id == j.end() || !id->is_number_integer()) {
    throw ProtocolError("response lacks an integer \"id\": " + line);
  }
  EvalResponse r;
  if (id->is_number_unsigned()) {
    r.id = id->get<std::uint64_t>();
  } else {
    // A negative id (the worker could not read ours) matches nothing.
    throw ProtocolError("worker could not parse a request: " + line);
  }
  auto acc = j.find("accuracy");
  auto err = j.find("error");
  if (acc != j.end() && acc->is_number()) {
    r.accuracy = acc->get<double>();
  } else if (err != j.end() && err->is_string()) {
    r.error = err->get<std::string>();
    if (r.error.empty()) r.error = "unspecified worker error";
  } else {
    throw ProtocolError("response needs a numeric \"accuracy\" or string \"error\": " + line);
  }
  return r;
}

ExternalEvaluator::ExternalEvaluator(std::string command, ExternalOptions options)
    : command_(std::move(command)), options_(options) {
  int in_pair[2];
  int out_pair[2];
  // Sockets rather than pipes so writes can use MSG_NOSIGNAL instead of
  // touching the process-wide SIGPIPE disposition.
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) {
    throw EvaluatorFailure("socketpair: " + errno_text());
  }
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
    ::close(in_pair[0]);
    ::close(in_pair[1]);
    throw EvaluatorFailure("socketpair: " + errno_text());
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pair[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pair[1], STDOUT_FILENO);

  std::string shell = "/bin/sh";
  std::string dash_c = "-c";
  char* argv[] = {shell.data(), dash_c.data(), command_.data(), nullptr};
  const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pair[1]);
  ::close(out_pair[1]);
  to_worker_ = in_pair[0];
  from_worker_ = out_pair[0];
  if (rc != 0) {
    ::close(to_worker_);
    ::close(from_worker_);
    pid_ = -1;
    throw EvaluatorFailure("cannot spawn worker '" + command_ + "': " + std::strerror(rc));
  }

  try {
    auto line = read_line();
    if (!line) {
      const int status = shutdown();
      throw EvaluatorFailure("worker '" + command_ + "' exited before the handshake (status " +
                             std::to_string(status) + ")");
    }
    handshake_ = parse_handshake(*line);
  } catch (...) {
    shutdown();
    throw;
  }
}

ExternalEvaluator::~ExternalEvaluator() { shutdown(); }

void ExternalEvaluator::write_all(const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(to_worker_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EvaluatorFailure("writing to worker: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> ExternalEvaluator::read_line() {
  while (true) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (from_worker_ < 0) return std::nullopt;
    if (options_.read_timeout.count() > 0) {
      pollfd pfd{from_worker_, POLLIN, 0};
      int rc;
      do {
        rc = ::poll(&pfd, 1, static_cast<int>(options_.read_timeout.count()));
      } while (rc < 0 && errno == EINTR);
      if (rc == 0) {
        throw EvaluatorFailure("worker sent nothing for " +
                               std::to_string(options_.read_timeout.count()) + " ms");
      }
    }
    char chunk[4096];
    const ssize_t n = ::read(from_worker_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EvaluatorFailure("reading from worker: " + errno_text());
    }
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      // Final line without a newline.
      std::string line = std::move(buffer_);
      buffer_.clear();
      return line;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<EvalResponse> ExternalEvaluator::evaluate_batch(std::span<const EvalRequest> batch,
                                                            const BatchOptions&) {
  std::lock_guard lock(mu_);
  if (exit_status_) throw EvaluatorFailure("worker '" + command_ + "' already shut down");
  std::vector<EvalResponse> out(batch.size());
  if (batch.empty()) return out;

  std::unordered_map<std::uint64_t, std::size_t> outstanding;
  std::string payload;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::uint64_t wire_id = next_id_++;
    outstanding.emplace(wire_id, i);
    out[i].id = batch[i].id;
    payload += format_request(wire_id, batch[i].window);
    payload += '\n';
  }

  // The writer runs beside the reader so a worker that answers while still
  // reading cannot deadlock against a full socket buffer.
  std::exception_ptr write_error;
  std::jthread writer([&] {
    try {
      write_all(payload);
    } catch (...) {
      write_error = std::current_exception();
    }
  });

  while (!outstanding.empty()) {
    auto line = read_line();
    if (!line) {
      writer.join();
      throw EvaluatorFailure("worker '" + command_ + "' closed its output with " +
                             std::to_string(outstanding.size()) + " request(s) unanswered");
    }
    if (line->empty()) continue;
    EvalResponse r = parse_response(*line);
    auto it = outstanding.find(r.id);
    if (it == outstanding.end()) {
      writer.join();
      throw ProtocolError("response for unknown or repeated id " + std::to_string(r.id));
    }
    const std::size_t slot = it->second;
    outstanding.erase(it);
    if (r.accuracy) {
      validate_accuracy(*r.accuracy, describe() + " " + to_string(batch[slot].window));
    }
    out[slot].accuracy = r.accuracy;
    out[slot].error = std::move(r.error);
  }
  writer.join();
  if (write_error) std::rethrow_exception(write_error);
  return out;
}

double ExternalEvaluator::accuracy(const Window& w) {
  const EvalRequest req{0, w};
  auto res = evaluate_batch(std::span<const EvalRequest>(&req, 1), BatchOptions{});
  if (!res.front().ok()) {
    throw EvaluatorFailure("worker failed on window " + to_string(w) + ": " + res.front().error);
  }
  return *res.front().accuracy;
}

int ExternalEvaluator::shutdown() {
  if (exit_status_) return *exit_status_;
  if (to_worker_ >= 0) {
    ::close(to_worker_);
    to_worker_ = -1;
  }
  if (pid_ < 0) {
    exit_status_ = -1;
    return -1;
  }
  // Drain anything left so the worker never blocks on a full buffer.
  const auto deadline = std::chrono::steady_clock::now() + options_.exit_timeout;
  while (from_worker_ >= 0) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) break;
    pollfd pfd{from_worker_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) break;
    char chunk[4096];
    const ssize_t n = ::read(from_worker_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
  }
  if (from_worker_ >= 0) {
    ::close(from_worker_);
    from_worker_ = -1;
  }

  int status = 0;
  pid_t r;
  while (true) {
    r = ::waitpid(pid_, &status, WNOHANG);
    if (r != 0 || std::chrono::steady_clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (r == 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, &status, 0);
  }
  exit_status_ = decode_status(status);
  pid_ = -1;
  return *exit_status_;
}

}  // namespace layerga
