// Copyright 2026 The PacPriv Authors
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

#ifndef PACPRIV_ERRORS_HPP_
#define PACPRIV_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pacpriv {

// A caller passed an argument outside the documented domain.
class InvalidParameterError : public std::invalid_argument {
 public:
  explicit InvalidParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Inputs were structurally malformed (dimension mismatch, non-finite
// values, unparsable files).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// The cumulative mutual-information ledger crossed its halt threshold;
// the query is refused. Carries the ledger state at refusal time.
class BudgetExhaustedError : public std::runtime_error {
 public:
  BudgetExhaustedError(const std::string& what, double cumulative_mi,
                       double mia_bound)
      : std::runtime_error(what),
        cumulative_mi(cumulative_mi),
        mia_bound(mia_bound) {}

  double cumulative_mi;
  double mia_bound;
};

// A numeric oracle was asked for an instance outside its supported range
// (e.g. quadrature in too many dimensions).
class UnsupportedInstanceError : public std::runtime_error {
 public:
  explicit UnsupportedInstanceError(const std::string& what)
      : std::runtime_error(what) {}
};

// An internal consistency check failed; results must not be trusted.
class InvariantViolationError : public std::runtime_error {
 public:
  explicit InvariantViolationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace pacpriv

#endif  // PACPRIV_ERRORS_HPP_
