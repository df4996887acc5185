//
// Copyright 2026 The FaultForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace faultforge {

/// Base class for all faultforge data and transport errors. Violated
/// preconditions (caller bugs) throw std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes are not valid UTF-8 / base64 / PNG.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// A structured line (scenario file, prediction file, CSV) failed validation.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what),
        line_no_(line_no) {}

  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class LengthMismatchError : public Error {
 public:
  using Error::Error;
};

/// SS_tot of a regression target is zero while residuals are not.
class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

class EmptyGroupError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Connection-level failure or retry budget exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Backend answered with a non-retryable error status.
class BackendError : public Error {
 public:
  BackendError(int status, const std::string& what)
      : Error("backend status " + std::to_string(status) + ": " + what),
        status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

class MagicError : public Error {
 public:
  using Error::Error;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  using Error::Error;
};

}  // namespace faultforge
