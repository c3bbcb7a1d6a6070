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

#ifndef PACPRIV_ACCOUNTING_HPP_
#define PACPRIV_ACCOUNTING_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace pacpriv {

// Budget values throughout this module are the raw quantities plugged into
// the natural-log posterior-advantage bound
//   (1-dA) log((1-dA)/(1-d0)) + dA log(dA/d0) <= B,
// the convention that reproduces the published guarantee tables exactly.

// Largest achievable adversary success rate (1 - delta_A) given total
// mutual information B and prior failure probability delta_0, solved by
// bisection to 1e-12. Returns 1.0 once the bound goes vacuous.
double mia_bound_from_mi(double total_mi, double prior_failure);

// Success-rate ceiling implied by (epsilon, delta) differential privacy:
// 1 - (1 - delta) / (1 + e^epsilon).
double dp_mia_bound(double epsilon, double delta);

// Inverse of dp_mia_bound in epsilon (closed form). The bound must exceed
// dp_mia_bound(0, delta).
double dp_epsilon_for_bound(double mia_bound, double delta);

// Like dp_epsilon_for_bound, but maps bounds at or below the epsilon = 0
// ceiling to 0 instead of throwing; used for reporting surfaces.
double dp_epsilon_or_zero(double mia_bound, double delta);

// Largest number of uniform-budget steps whose guarantee is still at least
// as strong as (epsilon, delta)-DP, by exponential-then-binary search.
std::int64_t max_queries_for_epsilon(double step_budget, double epsilon,
                                     double delta);

// Worst-case-channel composition baseline: iterates
//   B_1 = b,  B_t = B_{t-1} + min{ b' * sqrt(2 B_{t-1}) + b, b' }.
double static_composition_bound(double b, double b_prime, std::int64_t steps);

// The same baseline with the worst-case clamp dropped,
//   B_t = B_{t-1} + b + b' * sqrt(2 B_{t-1}),
// the b' >> b growth model behind the quadratic-regime analysis (sqrt(B_t)
// advances by at least 3b'/8 per step once B >= b'^2, so B_T = Omega(T^2)).
double static_composition_unclamped(double b, double b_prime,
                                    std::int64_t steps);

// One line of the guarantee table.
struct GuaranteeRow {
  double total_mi = 0.0;        // natural-log units (as plugged into the bound)
  double total_mi_bits = 0.0;   // total_mi / ln 2
  double prior_failure = 0.5;
  double mia_bound = 0.0;       // success-rate ceiling in [1 - d0, 1]
  double dp_epsilon_equiv = 0.0;  // at dp_delta
  double dp_delta = 0.0;
};

GuaranteeRow make_guarantee_row(double total_mi, double prior_failure,
                                double dp_delta);

// Machine-readable guarantee table: one body row per (budget, horizon) pair
// plus per-budget rows giving the largest horizon matching each DP target.
struct GuaranteeTable {
  struct Cell {
    std::string kind;  // "body", or "t_max_eps_<target>"
    double step_budget = 0.0;
    std::int64_t horizon = 0;
    double total_mi = 0.0;
    double mia_bound_pct = 0.0;
    double dp_epsilon_equiv = 0.0;
  };
  std::vector<Cell> cells;

  // CSV columns: kind,b_bits,T,B_total,mia_bound_pct,dp_epsilon_equiv.
  std::string to_csv() const;
};

GuaranteeTable build_guarantee_table(const std::vector<double>& step_budgets,
                                     const std::vector<std::int64_t>& horizons,
                                     const std::vector<double>& dp_epsilons,
                                     double dp_delta);

}  // namespace pacpriv

#endif  // PACPRIV_ACCOUNTING_HPP_
