// Copyright 2026 The edgepar Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace edgepar {

// Base for every error raised by the library. Subclasses map onto the
// error categories the CLI reports (configuration, parse, protocol, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment / stream / policy parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file content. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Out-of-contract event sequences (duplicate frame index, incomplete results).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Invalid numeric input to a metric or geometry routine.
class InputError : public Error {
 public:
  using Error::Error;
};

// A metric is undefined for the given data (e.g. FPS with nothing processed).
class MetricError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgepar
