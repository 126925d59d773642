/*
 * Copyright 2026 The reviewscope Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace reviewscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but carries no usable records or violates a file schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A pair is both must-linked and cannot-linked after closure.
class ConstraintError : public Error {
 public:
  ConstraintError(std::string first, std::string second, const std::string& what)
      : Error(what), first_(std::move(first)), second_(std::move(second)) {}

  const std::string& first() const { return first_; }
  const std::string& second() const { return second_; }

 private:
  std::string first_;
  std::string second_;
};

/// COP-Kmeans could not place a point in any cluster without violating a
/// constraint, in every restart.
class InfeasibleAssignment : public Error {
 public:
  InfeasibleAssignment(std::string doc_id, const std::string& what)
      : Error(what), doc_id_(std::move(doc_id)) {}

  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

/// Non-fatal conditions collected while a stage runs. Warnings never abort.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  std::size_t count() const { return warnings.size(); }
};

inline void warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace reviewscope
