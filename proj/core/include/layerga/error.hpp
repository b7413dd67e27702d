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

#ifndef LAYERGA_ERROR_HPP_
#define LAYERGA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace layerga {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" can catch this; the subclasses carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedGenomeError : public Error {
 public:
  using Error::Error;
};

class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class EmptyPopulationError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

// A lookup table has no entry for the requested window.
class MissingEntryError : public Error {
 public:
  using Error::Error;
};

// The external worker violated the line protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The evaluator could not produce a result at all (crashed worker, missing
// response after shutdown, spawn failure).
class EvaluatorFailure : public Error {
 public:
  using Error::Error;
};

// An accuracy outside [0, 1] crossed a backend boundary.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Input file could not be parsed. `line()` is 1-based, 0 when not tied to a
// particular line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Bad user-supplied configuration (maps to the usage exit status in the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace layerga

#endif  // LAYERGA_ERROR_HPP_
