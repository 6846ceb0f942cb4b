// Copyright 2026 The Equiscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EQUISCOPE_ERRORS_H_
#define EQUISCOPE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace equiscope {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Manifest or CSV layout does not match what was declared. Maps to CLI exit
// code 2.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cell could not be parsed. Carries the 1-based data row and column name.
class ParseError : public SchemaError {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : SchemaError(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// A statistic is not defined for the given input (e.g. AUC of a single-class
// sample). Never silently replaced by a number.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Invalid argument to a library operation (precondition violated).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace equiscope

#endif  // EQUISCOPE_ERRORS_H_
