// Copyright (c) 2026 The enforcekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace enforcekit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column),
        detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

/// Well-formed text that violates a structural invariant
/// (non-monotone seq, unknown state, off-alphabet pattern, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Name lookup failed (module, lifecycle model).
class LookupError : public Error {
 public:
  using Error::Error;
};

/// An event could not be routed to an automaton instance.
class DispatchError : public Error {
 public:
  using Error::Error;
};

/// Enforcement failed while processing the input event at `seq()`.
/// A seq of 0 means the failure was raised outside of a trace fold.
class EnforcementError : public Error {
 public:
  explicit EnforcementError(const std::string& what, std::uint64_t seq = 0)
      : Error(seq == 0 ? what : "seq " + std::to_string(seq) + ": " + what), seq_(seq), detail_(what) {}

  std::uint64_t seq() const noexcept { return seq_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::uint64_t seq_;
  std::string detail_;
};

/// A scenario script is malformed at the given 1-based step.
class ScenarioError : public Error {
 public:
  ScenarioError(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace enforcekit
