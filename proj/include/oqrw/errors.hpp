// Copyright 2026 The oqrw-tree Authors
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

namespace oqrw {

// Error families. The numeric values double as CLI exit codes.
enum class ErrorKind {
  Parse = 2,
  Validation = 3,
  UnsupportedShape = 4,
  Numerical = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorKind::Parse, w) {}
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct IndexError : Error {
  explicit IndexError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct ZeroBlockError : Error {
  explicit ZeroBlockError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorKind::Validation, w) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NotHermitianError : Error {
  explicit NotHermitianError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NotPositiveError : Error {
  explicit NotPositiveError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NotDensityError : Error {
  explicit NotDensityError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NotBlockDiagonalError : Error {
  explicit NotBlockDiagonalError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct NotNormalizableError : Error {
  explicit NotNormalizableError(const std::string& w) : Error(ErrorKind::Numerical, w) {}
};

struct DimensionTooLargeError : Error {
  explicit DimensionTooLargeError(const std::string& w) : Error(ErrorKind::UnsupportedShape, w) {}
};

struct UnsupportedShapeError : Error {
  explicit UnsupportedShapeError(const std::string& w) : Error(ErrorKind::UnsupportedShape, w) {}
};

struct UnsupportedBoundaryError : Error {
  explicit UnsupportedBoundaryError(const std::string& w) : Error(ErrorKind::UnsupportedShape, w) {}
};

}  // namespace oqrw
