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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "pacpriv/accounting.hpp"
#include "pacpriv/errors.hpp"

using namespace pacpriv;

namespace {

// Published guarantee grid: success-rate ceilings (%) for per-step budgets
// 2^-4 ... 2^-32 (columns) after T responses (rows), printed at mixed
// precision. The comparison tolerance is one unit in the last printed
// decimal place.
constexpr const char* kGuaranteeGrid[7][8] = {
    {"67.5", "54.4", "51.1", "50.3", "50.07", "50.02", "50.00", "50.00"},
    {"98.7", "63.9", "53.5", "50.9", "50.22", "50.05", "50.01", "50.00"},
    {"100", "91.0", "61.0", "52.8", "50.69", "50.17", "50.04", "50.01"},
    {"100", "100", "83.4", "58.7", "52.18", "50.55", "50.14", "50.03"},
    {"100", "100", "100", "76.9", "56.89", "51.73", "50.43", "50.11"},
    {"100", "100", "100", "100", "71.48", "55.45", "51.36", "50.34"},
    {"100", "100", "100", "100", "100", "67.09", "54.31", "51.08"},
};
constexpr std::int64_t kHorizons[7] = {1,     10,     100,    1000,
                                       10000, 100000, 1000000};

double printed_tolerance(const char* text) {
  const char* dot = std::strchr(text, '.');
  if (dot == nullptr) return 1.0;
  return std::pow(10.0, -static_cast<double>(std::strlen(dot + 1)));
}

double budget_for_column(int column) {
  return std::pow(2.0, -4.0 * (column + 1));
}

}  // namespace

TEST_CASE("mia bound: worked scalar examples") {
  // B = 2^-2 caps success at 83.78%, B = 2^-10 at 52.21%.
  CHECK(std::abs(100.0 * mia_bound_from_mi(0.25, 0.5) - 83.78) <= 0.01);
  CHECK(std::abs(100.0 * mia_bound_from_mi(std::pow(2.0, -10.0), 0.5) -
                 52.21) <= 0.01);
  CHECK(mia_bound_from_mi(0.0, 0.5) == 0.5);
  CHECK(std::abs(100.0 * mia_bound_from_mi(10.0 * std::pow(2.0, -8.0), 0.5) -
                 63.9) <= 0.1);
}

TEST_CASE("mia bound: vacuous regime and parameter checks") {
  CHECK(mia_bound_from_mi(0.7, 0.5) == 1.0);  // above ln 2
  CHECK(mia_bound_from_mi(100.0, 0.5) == 1.0);
  CHECK_THROWS_AS(mia_bound_from_mi(0.1, 0.0), InvalidParameterError);
  CHECK_THROWS_AS(mia_bound_from_mi(0.1, 1.0), InvalidParameterError);
  CHECK_THROWS_AS(mia_bound_from_mi(-0.1, 0.5), InvalidParameterError);
}

TEST_CASE("mia bound: nondecreasing and continuous on a grid") {
  double prev = 0.5;
  for (int k = 0; k <= 1000; ++k) {
    const double total = 0.001 * k;
    const double bound = mia_bound_from_mi(total, 0.5);
    CHECK(bound >= prev - 1e-12);
    if (k > 0) CHECK(bound - prev <= 0.02);  // no jumps on this grid
    prev = bound;
  }
}

TEST_CASE("mia bound: honors non-balanced priors") {
  CHECK(mia_bound_from_mi(0.0, 0.25) == 0.75);
  const double low = mia_bound_from_mi(0.01, 0.25);
  const double high = mia_bound_from_mi(0.05, 0.25);
  CHECK(low > 0.75);
  CHECK(high > low);
}

TEST_CASE("guarantee grid reproduces every published body cell") {
  for (int row = 0; row < 7; ++row) {
    for (int col = 0; col < 8; ++col) {
      const double total =
          static_cast<double>(kHorizons[row]) * budget_for_column(col);
      const double bound_pct = 100.0 * mia_bound_from_mi(total, 0.5);
      const double printed = std::atof(kGuaranteeGrid[row][col]);
      const double tol = printed_tolerance(kGuaranteeGrid[row][col]);
      INFO("T=", kHorizons[row], " b=2^-", 4 * (col + 1), " got ", bound_pct,
           " want ", printed, " +/- ", tol);
      CHECK(std::abs(bound_pct - printed) <= tol + 1e-9);
    }
  }
}

TEST_CASE("dp mia bound: published values") {
  CHECK(std::abs(100.0 * dp_mia_bound(1.0, 1e-5) - 73.11) <= 0.01);
  CHECK(std::abs(100.0 * dp_mia_bound(0.1, 1e-5) - 52.50) <= 0.01);
  CHECK(dp_mia_bound(0.0, 0.0) == 0.5);
}

TEST_CASE("dp epsilon inversion: closed-form round trip") {
  for (double eps = 0.001; eps <= 10.0; eps *= 1.31) {
    const double bound = dp_mia_bound(eps, 1e-5);
    CHECK(dp_epsilon_for_bound(bound, 1e-5) ==
          doctest::Approx(eps).epsilon(1e-10));
  }
  CHECK_THROWS_AS(dp_epsilon_for_bound(0.5, 1e-5), InvalidParameterError);
  CHECK_THROWS_AS(dp_epsilon_for_bound(1.0, 1e-5), InvalidParameterError);
  CHECK(dp_epsilon_or_zero(0.5, 1e-5) == 0.0);
}

TEST_CASE("dp epsilon equivalents of published cumulative budgets") {
  // One million responses at b = 2^-32 match (0.04, 1e-5)-DP.
  const double bound_1m = mia_bound_from_mi(1e6 * std::pow(2.0, -32.0), 0.5);
  CHECK(std::abs(100.0 * bound_1m - 51.08) <= 0.01);
  CHECK(std::abs(dp_epsilon_for_bound(bound_1m, 1e-5) - 0.04) <= 0.005);

  // 210k responses at b = 2^-32: ceiling 50.49%, epsilon 0.0198.
  const double bound_210k =
      mia_bound_from_mi(210000.0 * std::pow(2.0, -32.0), 0.5);
  CHECK(std::abs(100.0 * bound_210k - 50.49) <= 0.01);
  CHECK(std::abs(dp_epsilon_for_bound(bound_210k, 1e-5) - 0.0198) <= 1e-4);
}

TEST_CASE("max queries matching dp targets") {
  const double delta = 1e-5;
  CHECK(max_queries_for_epsilon(std::pow(2.0, -8.0), 1.0, delta) == 28);
  CHECK(max_queries_for_epsilon(std::pow(2.0, -4.0), 8.0, delta) == 11);
  const std::int64_t big =
      max_queries_for_epsilon(std::pow(2.0, -32.0), 1.0, delta);
  CHECK(std::abs(static_cast<double>(big) - 477e6) <= 0.005 * 477e6);
  // a hopeless budget cannot even afford one response
  CHECK(max_queries_for_epsilon(10.0, 0.1, delta) == 0);
}

TEST_CASE("max queries full footer rows") {
  const double delta = 1e-5;
  const std::int64_t eps1[8] = {1,       28,      454,      7000,
                                116000,  2000000, 30000000, 477000000};
  const double eps1_unit[8] = {1, 1, 1, 1000, 1000, 1e6, 1e6, 1e6};
  const std::int64_t eps8[8] = {11,     176,      3000,      45000,
                                724000, 12000000, 185000000, 3000000000};
  const double eps8_unit[8] = {1, 1, 1000, 1000, 1000, 1e6, 1e6, 1e9};
  for (int col = 0; col < 8; ++col) {
    const double b = budget_for_column(col);
    const std::int64_t t1 = max_queries_for_epsilon(b, 1.0, delta);
    CHECK(std::llround(static_cast<double>(t1) / eps1_unit[col]) *
              static_cast<std::int64_t>(eps1_unit[col]) ==
          eps1[col]);
    const std::int64_t t8 = max_queries_for_epsilon(b, 8.0, delta);
    CHECK(std::llround(static_cast<double>(t8) / eps8_unit[col]) *
              static_cast<std::int64_t>(eps8_unit[col]) ==
          eps8[col]);
  }
}

TEST_CASE("static composition: equal budgets stay exactly linear") {
  const double b = std::pow(2.0, -6.0);
  for (std::int64_t t : {1, 2, 3, 10, 100, 10000}) {
    CHECK(static_composition_bound(b, b, t) == static_cast<double>(t) * b);
  }
}

TEST_CASE("static composition: frozen three-step iteration") {
  // Oracle: direct iteration of the recurrence by hand.
  CHECK(static_composition_bound(0.01, 1.0, 1) == doctest::Approx(0.01));
  CHECK(static_composition_bound(0.01, 1.0, 2) ==
        doctest::Approx(0.1614213562373095).epsilon(1e-12));
  CHECK(static_composition_bound(0.01, 1.0, 3) ==
        doctest::Approx(0.7396137820194617).epsilon(1e-12));
}

TEST_CASE("static composition: arithmetic progression of sqrt totals") {
  const double b = 0.01, b_prime = 1.0;
  double prev = static_composition_bound(b, b_prime, 1);
  bool in_regime = false;
  for (std::int64_t t = 2; t <= 2048; ++t) {
    const double cur = static_composition_bound(b, b_prime, t);
    if (in_regime) {
      CHECK(std::sqrt(cur) - std::sqrt(prev) >= 3.0 / 8.0 - 1e-12);
    }
    if (prev >= b_prime * b_prime) in_regime = true;
    prev = cur;
  }
  CHECK(in_regime);
}

TEST_CASE("static composition: quadratic growth when b' dominates") {
  const double at_1024 = static_composition_bound(0.01, 1.0, 1 << 10);
  const double at_2048 = static_composition_bound(0.01, 1.0, 1 << 11);
  const double ratio = at_2048 / at_1024;
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);
}

TEST_CASE("static composition dominates the linear ledger") {
  for (double b : {0.001, 0.01, 0.1}) {
    for (double b_prime : {0.05, 0.5, 1.0, 5.0}) {
      if (b_prime <= b) continue;
      for (std::int64_t t : {2, 5, 17, 100}) {
        CHECK(static_composition_bound(b, b_prime, t) >=
              static_cast<double>(t) * b);
      }
    }
  }
}

TEST_CASE("guarantee rows: monotone in total budget, anchored at prior") {
  double prev_bound = 0.0;
  for (int k = 0; k < 200; ++k) {
    const GuaranteeRow row = make_guarantee_row(1e-4 * k, 0.5, 1e-5);
    CHECK(row.mia_bound >= prev_bound);
    prev_bound = row.mia_bound;
  }
  const GuaranteeRow zero = make_guarantee_row(0.0, 0.5, 1e-5);
  CHECK(zero.mia_bound == 0.5);
  CHECK(zero.total_mi_bits == 0.0);
}

TEST_CASE("guarantee table: shape and footer rows") {
  const GuaranteeTable table =
      build_guarantee_table({std::pow(2.0, -8.0)}, {1}, {1.0}, 1e-5);
  REQUIRE(table.cells.size() == 2);
  CHECK(table.cells[0].kind == "body");
  CHECK(table.cells[0].horizon == 1);
  CHECK(table.cells[1].kind == "t_max_eps_1");
  CHECK(table.cells[1].horizon == 28);
  const std::string csv = table.to_csv();
  CHECK(csv.find("kind,b_bits,T,B_total,mia_bound_pct,dp_epsilon_equiv") == 0);
}
