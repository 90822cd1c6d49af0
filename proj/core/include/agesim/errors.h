// Copyright 2026 The agesim Authors.
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

#ifndef AGESIM_ERRORS_H_
#define AGESIM_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agesim {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scenario, workload, fault or resource configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptySeriesError : public Error {
 public:
  using Error::Error;
};

// Fewer observations than an estimator needs.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// An ageing summary needs a bin that the hourly series does not contain.
class MissingPhaseBinError : public Error {
 public:
  explicit MissingPhaseBinError(std::string bin);
  const std::string& bin() const { return bin_; }

 private:
  std::string bin_;
};

// Deleting an entity kind whose live count is already zero.
class LedgerUnderflowError : public Error {
 public:
  using Error::Error;
};

// `line` is 1-based; 0 when the position is unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateTimestampError : public Error {
 public:
  DuplicateTimestampError(std::string metric, double timestamp);
  const std::string& metric() const { return metric_; }
  double timestamp() const { return timestamp_; }

 private:
  std::string metric_;
  double timestamp_;
};

class EmptyFileError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace agesim

#endif  // AGESIM_ERRORS_H_
