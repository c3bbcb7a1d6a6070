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
#include <limits>
#include <vector>

#include "doctest.h"
#include "pacpriv/mathutil.hpp"

using namespace pacpriv;

TEST_CASE("log_sum_exp basics") {
  std::vector<double> v = {std::log(0.25), std::log(0.75)};
  CHECK(log_sum_exp(v) == doctest::Approx(0.0).epsilon(1e-14));

  std::vector<double> shifted = {1000.0, 1000.0};
  CHECK(log_sum_exp(shifted) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));

  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> with_zero = {0.0, ninf};
  CHECK(log_sum_exp(with_zero) == doctest::Approx(0.0));
  std::vector<double> all_zero = {ninf, ninf};
  CHECK(log_sum_exp(all_zero) == ninf);
}

TEST_CASE("kahan sum keeps tiny uniform budgets exact") {
  KahanSum sum;
  const double b = std::pow(2.0, -32.0);
  for (int i = 0; i < 1000000; ++i) sum.add(b);
  CHECK(sum.value() == 1000000.0 * b);
}

TEST_CASE("normal quantile matches reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.9) ==
        doctest::Approx(1.2815515655446004).epsilon(1e-10));
  CHECK(normal_quantile(0.99) ==
        doctest::Approx(2.3263478740408408).epsilon(1e-10));
  CHECK(normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(normal_quantile(1e-10) ==
        doctest::Approx(-6.361340902404056).epsilon(1e-9));
  // quantile and CDF invert each other across the working range
  for (double p : {1e-9, 1e-4, 0.02, 0.3, 0.5, 0.77, 0.9999, 1.0 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("normal sampler moments and determinism") {
  NormalSampler a(42);
  NormalSampler b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  NormalSampler s(7);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.next();
    sum += x;
    sum2 += x * x;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derived seeds differ across indices") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(123, 45) == derive_seed(123, 45));
}

TEST_CASE("gauss hermite integrates normal moments") {
  const GaussHermiteRule rule = gauss_hermite(40);
  double w = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    w += rule.weights[i];
    m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ks distance small for normal data, large for shifted") {
  NormalSampler s(99);
  std::vector<double> x(50000);
  for (double& v : x) v = s.next();
  CHECK(ks_distance_to_normal(x) < 0.01);
  for (double& v : x) v += 0.5;
  CHECK(ks_distance_to_normal(x) > 0.1);
}
