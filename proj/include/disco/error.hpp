// Copyright 2026 The disco Authors
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

namespace disco {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model file, query text or expression. Positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)),
        line_(line),
        column_(column),
        detail_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column) {
    return "parse error at " + std::to_string(line) + ":" +
           std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// A model or query failed validation, or an operation was called on input
// that violates its precondition (unknown variable, value outside domain...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of probability zero.
class NullEventError : public Error {
 public:
  using Error::Error;
};

// Some unit has zero probability of the requested treatment.
class PositivityError : public Error {
 public:
  using Error::Error;
};

// Valid input outside what an operation supports (non-binary treatment,
// non-degenerate noise, instance too large, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// An internal invariant was broken. Never expected in practice.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace disco
