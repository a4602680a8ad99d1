// Copyright 2026 The rde Authors
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
#ifndef RDE_ERRORS_HPP_
#define RDE_ERRORS_HPP_

#include <optional>
#include <stdexcept>
#include <string>

namespace rde {

// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed data: unnormalized distributions, negative masses, bad files,
// mismatched alphabets. CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Ill-formed call: overlapping axis sets, indices or parameters out of
// range, enumeration budgets exceeded. CLI exit code 1.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// The requested constraints admit no solution. When thrown by the rate
// solver for an equivocation target above the reachable maximum, the
// current estimate of that maximum is attached. CLI exit code 2.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what,
                           std::optional<double> gamma_estimate = std::nullopt)
      : Error(what), gamma_estimate(gamma_estimate) {}

  std::optional<double> gamma_estimate;
};

// An iterative solver hit its iteration cap before meeting its convergence
// criterion. Carries the last iterate so callers can inspect how close the
// run got. CLI exit code 3.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_rate,
                   double last_distortion, double residual)
      : Error(what),
        last_rate(last_rate),
        last_distortion(last_distortion),
        residual(residual) {}

  double last_rate;
  double last_distortion;
  double residual;
};

}  // namespace rde

#endif  // RDE_ERRORS_HPP_
