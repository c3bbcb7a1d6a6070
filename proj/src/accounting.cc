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

#include "pacpriv/accounting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "pacpriv/errors.hpp"

namespace pacpriv {

namespace {

constexpr double kBisectTol = 1e-12;
constexpr double kUpperBracketGap = 1e-15;

// KL(Bern(1-s) || Bern(d0)) as a function of the success rate s >= 1 - d0.
double posterior_advantage(double success, double prior_failure) {
  const double prior_success = 1.0 - prior_failure;
  const double failure = 1.0 - success;
  double kl = success * std::log(success / prior_success);
  if (failure > 0.0) kl += failure * std::log(failure / prior_failure);
  return kl;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

double mia_bound_from_mi(double total_mi, double prior_failure) {
  if (!(prior_failure > 0.0 && prior_failure < 1.0)) {
    throw InvalidParameterError("mia_bound_from_mi: prior_failure not in (0,1)");
  }
  if (total_mi < 0.0) {
    throw InvalidParameterError("mia_bound_from_mi: negative budget");
  }
  if (total_mi == 0.0) return 1.0 - prior_failure;  // no posterior advantage
  double lo = 1.0 - prior_failure;   // advantage 0, always feasible
  double hi = 1.0 - kUpperBracketGap;
  if (posterior_advantage(hi, prior_failure) <= total_mi) {
    return 1.0;  // vacuous regime
  }
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    if (posterior_advantage(mid, prior_failure) <= total_mi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double dp_mia_bound(double epsilon, double delta) {
  if (epsilon < 0.0) {
    throw InvalidParameterError("dp_mia_bound: negative epsilon");
  }
  if (delta < 0.0 || delta >= 1.0) {
    throw InvalidParameterError("dp_mia_bound: delta not in [0,1)");
  }
  return 1.0 - (1.0 - delta) / (1.0 + std::exp(epsilon));
}

double dp_epsilon_for_bound(double mia_bound, double delta) {
  if (delta < 0.0 || delta >= 1.0) {
    throw InvalidParameterError("dp_epsilon_for_bound: delta not in [0,1)");
  }
  const double floor_bound = dp_mia_bound(0.0, delta);
  if (!(mia_bound > floor_bound && mia_bound < 1.0)) {
    throw InvalidParameterError(
        "dp_epsilon_for_bound: bound not achievable at this delta");
  }
  return std::log((1.0 - delta) / (1.0 - mia_bound) - 1.0);
}

double dp_epsilon_or_zero(double mia_bound, double delta) {
  if (mia_bound <= dp_mia_bound(0.0, delta)) return 0.0;
  if (mia_bound >= 1.0) return std::numeric_limits<double>::infinity();
  return dp_epsilon_for_bound(mia_bound, delta);
}

std::int64_t max_queries_for_epsilon(double step_budget, double epsilon,
                                     double delta) {
  if (!(step_budget > 0.0)) {
    throw InvalidParameterError("max_queries_for_epsilon: budget must be > 0");
  }
  const double target = dp_mia_bound(epsilon, delta);
  auto within = [&](std::int64_t t) {
    return mia_bound_from_mi(static_cast<double>(t) * step_budget, 0.5) <=
           target;
  };
  if (!within(1)) return 0;
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  while (within(hi)) {
    lo = hi;
    if (hi > (std::numeric_limits<std::int64_t>::max() >> 1)) break;
    hi <<= 1;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (within(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double static_composition_bound(double b, double b_prime, std::int64_t steps) {
  if (!(b > 0.0) || !(b_prime > 0.0)) {
    throw InvalidParameterError("static_composition_bound: budgets must be > 0");
  }
  if (steps < 1) {
    throw InvalidParameterError("static_composition_bound: need steps >= 1");
  }
  double total = b;
  for (std::int64_t t = 2; t <= steps; ++t) {
    total += std::min(b_prime * std::sqrt(2.0 * total) + b, b_prime);
  }
  return total;
}

double static_composition_unclamped(double b, double b_prime,
                                    std::int64_t steps) {
  if (!(b > 0.0) || !(b_prime > 0.0)) {
    throw InvalidParameterError(
        "static_composition_unclamped: budgets must be > 0");
  }
  if (steps < 1) {
    throw InvalidParameterError("static_composition_unclamped: need steps >= 1");
  }
  double total = b;
  for (std::int64_t t = 2; t <= steps; ++t) {
    total += b + b_prime * std::sqrt(2.0 * total);
  }
  return total;
}

GuaranteeRow make_guarantee_row(double total_mi, double prior_failure,
                                double dp_delta) {
  GuaranteeRow row;
  row.total_mi = total_mi;
  row.total_mi_bits = total_mi / std::log(2.0);
  row.prior_failure = prior_failure;
  row.mia_bound = mia_bound_from_mi(total_mi, prior_failure);
  row.dp_delta = dp_delta;
  row.dp_epsilon_equiv = dp_epsilon_or_zero(row.mia_bound, dp_delta);
  return row;
}

std::string GuaranteeTable::to_csv() const {
  std::ostringstream out;
  out << "kind,b_bits,T,B_total,mia_bound_pct,dp_epsilon_equiv\n";
  for (const Cell& cell : cells) {
    out << cell.kind << "," << format_double(cell.step_budget) << ","
        << cell.horizon << "," << format_double(cell.total_mi) << ","
        << format_double(cell.mia_bound_pct) << ",";
    if (std::isfinite(cell.dp_epsilon_equiv)) {
      out << format_double(cell.dp_epsilon_equiv);
    } else {
      out << "inf";
    }
    out << "\n";
  }
  return out.str();
}

GuaranteeTable build_guarantee_table(const std::vector<double>& step_budgets,
                                     const std::vector<std::int64_t>& horizons,
                                     const std::vector<double>& dp_epsilons,
                                     double dp_delta) {
  GuaranteeTable table;
  for (std::int64_t horizon : horizons) {
    for (double b : step_budgets) {
      const GuaranteeRow row = make_guarantee_row(
          static_cast<double>(horizon) * b, 0.5, dp_delta);
      table.cells.push_back({"body", b, horizon, row.total_mi,
                             100.0 * row.mia_bound, row.dp_epsilon_equiv});
    }
  }
  for (double eps : dp_epsilons) {
    for (double b : step_budgets) {
      const std::int64_t t_max = max_queries_for_epsilon(b, eps, dp_delta);
      const double total = static_cast<double>(t_max) * b;
      const double bound =
          t_max > 0 ? mia_bound_from_mi(total, 0.5) : 0.5;
      std::ostringstream kind;
      kind << "t_max_eps_" << format_double(eps);
      table.cells.push_back(
          {kind.str(), b, t_max, total, 100.0 * bound, eps});
    }
  }
  return table;
}

}  // namespace pacpriv
