// Copyright 2026 The qtroute Authors. All Rights Reserved.
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

#ifndef QTROUTE_ERRORS_H_
#define QTROUTE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtroute {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the 1-based line (0 when unknown) and the
// JSON path of the offending field.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : Error(Format(line, field, what)), line_(line), field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  static std::string Format(std::size_t line, const std::string& field,
                            const std::string& what) {
    std::string msg = "parse error";
    if (line > 0) msg += " at line " + std::to_string(line);
    if (!field.empty()) msg += " (field '" + field + "')";
    return msg + ": " + what;
  }

  std::size_t line_;
  std::string field_;
};

// A value that parsed fine but breaks a data-model invariant. invariant() is a
// short stable identifier such as "link.capacity_positive".
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& what)
      : Error("validation error [" + invariant + "]: " + what),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

// Mismatched vector or matrix sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtroute

#endif  // QTROUTE_ERRORS_H_
