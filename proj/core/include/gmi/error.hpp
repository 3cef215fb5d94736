// Copyright 2026 The gmi-graph Authors.
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

namespace gmi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the file and line.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. log of a non-positive value).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A forward value became NaN or infinite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyperparameter or option combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested edge-removal ratio cannot be met without disconnecting the graph.
class QuotaError : public Error {
 public:
  QuotaError(const std::string& what, double max_ratio)
      : Error(what), max_ratio_(max_ratio) {}
  double max_ratio() const noexcept { return max_ratio_; }

 private:
  double max_ratio_;
};

}  // namespace gmi
