// Copyright 2026 The qbclab Authors
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

namespace qbc {

/// Base class for all library errors. The `kind()` prefix of the message
/// ("shape error", "domain error", ...) is part of the contract and is
/// matched by tests.
class Error : public std::runtime_error {
 public:
  Error(const std::string& kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(kind) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

/// Mismatched matrix/vector/subsystem dimensions.
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error("shape error", what) {}
};

/// Input violates a mathematical precondition (non-normalized state,
/// non-unitary operator, weights not summing to one, ...).
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error("domain error", what) {}
};

/// Requested tensor dimension exceeds the configured maximum.
struct CapacityError : Error {
  explicit CapacityError(const std::string& what) : Error("capacity error", what) {}
};

/// Unknown or colliding subsystem / declaration label.
struct LookupError : Error {
  explicit LookupError(const std::string& what) : Error("lookup error", what) {}
};

/// Protocol script rejected by the parser; carries a source position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error("parse error",
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A step failed while executing a protocol.
class ExecutionError : public Error {
 public:
  ExecutionError(int step_index, const std::string& what)
      : Error("execution error", "step " + std::to_string(step_index) + ": " + what),
        step_index_(step_index) {}

  int step_index() const { return step_index_; }

 private:
  int step_index_;
};

}  // namespace qbc
