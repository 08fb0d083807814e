// src/errors.hpp

// Copyright 2026  CRP-Kit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CRPKIT_ERRORS_HPP_
#define CRPKIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace crpkit {

// Base of all library errors. config_error and usage_error map to exit
// code 2 at the CLI, everything else to exit code 1.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value or malformed config file.
class config_error : public error {
 public:
  using error::error;
};

// API called in a way that violates its preconditions (missing checkpoint,
// empty tape, wrong stage).
class usage_error : public error {
 public:
  using error::error;
};

// Mismatched grid/vector dimensions.
class shape_error : public error {
 public:
  using error::error;
};

// Argument outside the mathematical domain of an operation.
class domain_error : public error {
 public:
  using error::error;
};

// Non-finite values where finite ones are required.
class numeric_error : public error {
 public:
  using error::error;
};

// File I/O failure or unparseable file contents.
class io_error : public error {
 public:
  using error::error;
};

}  // namespace crpkit

#endif  // CRPKIT_ERRORS_HPP_
