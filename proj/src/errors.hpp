// Copyright (c) 2026 The rankent Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rankent {

// Error taxonomy shared by the whole library.  The C shim maps these codes
// onto rankent_status values one to one, so every throw site must pick the
// code a caller would want to branch on, not just the nearest base class.
enum class ErrorCode {
  invalid_argument,
  domain,
  parse,
  validation,
  no_convergence,
  infeasible,
  io,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCode::domain, what) {}
};

// An iterative scheme (quadrature, root find, optimizer) failed to reach its
// tolerance.  Never downgraded to a warning: callers must see this.
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what)
      : Error(ErrorCode::no_convergence, what) {}
};

// A constraint equation has no solution for the requested inputs.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorCode::infeasible, what) {}
};

// Malformed input text.  Carries 1-based line/column of the first offence.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(ErrorCode::parse, what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Structurally valid input that violates data invariants.  Collects every
// issue found so a caller can fix a file in one pass.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : Error(ErrorCode::validation, join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "validation failed (" + std::to_string(issues.size()) +
                      " issue" + (issues.size() == 1 ? "" : "s") + ")";
    for (const auto& s : issues) {
      out += "\n  - " + s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace rankent
