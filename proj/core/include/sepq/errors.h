/* Copyright 2026 The sepq Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef SEPQ_ERRORS_H_
#define SEPQ_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace sepq {

// Base class for every error raised by the library. `kind()` is a short
// machine-readable tag used by the command-line tool in its error lines.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  virtual const char* kind() const noexcept { return "error"; }

  // Pipeline stage that raised the error, if known ("analyze", ...).
  const std::string& stage() const noexcept { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  std::string stage_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

// Malformed container, manifest or report.
class FormatError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "format"; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_argument"; }
};

// The budget cannot be met even with every free layer at the minimum
// bit-width. Carries the cheapest achievable cost in budget units.
class InfeasibleBudget : public Error {
 public:
  InfeasibleBudget(const std::string& message, double minimum_cost)
      : Error(message), minimum_cost_(minimum_cost) {}
  const char* kind() const noexcept override { return "infeasible"; }
  double minimum_cost() const noexcept { return minimum_cost_; }

 private:
  double minimum_cost_;
};

}  // namespace sepq

#endif  // SEPQ_ERRORS_H_
