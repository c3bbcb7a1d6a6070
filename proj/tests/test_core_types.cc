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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"
#include "pacpriv/core_types.hpp"
#include "pacpriv/errors.hpp"

using namespace pacpriv;

namespace {

Universe tiny_universe(int n, int dim = 2) {
  std::vector<Record> records;
  for (int i = 0; i < n; ++i) {
    Record r;
    r.features = Eigen::VectorXd::Constant(dim, static_cast<double>(i));
    r.label = i % 2;
    records.push_back(std::move(r));
  }
  return Universe(std::move(records), 2);
}

}  // namespace

TEST_CASE("secret space: single record lands in exactly one of two subsets") {
  const Universe u = tiny_universe(1);
  for (std::uint64_t seed : {0u, 1u, 2u, 99u}) {
    const SecretSpace space = construct_secret_space(u, 2, seed);
    CHECK(space.row_count(0) == 1);
  }
}

TEST_CASE("secret space: n=2 m=4 rows hold exactly m/2 entries") {
  const Universe u = tiny_universe(2);
  const SecretSpace space = construct_secret_space(u, 4, 0);
  CHECK(space.row_count(0) == 2);
  CHECK(space.row_count(1) == 2);
}

TEST_CASE("secret space: large instance row sums and column balance") {
  const Universe u = tiny_universe(1000);
  const SecretSpace space = construct_secret_space(u, 128, 7);
  for (int i = 0; i < 1000; ++i) CHECK(space.row_count(i) == 64);
  // column sizes concentrate near n/2
  for (int j = 0; j < 128; ++j) {
    const int size = static_cast<int>(space.records_in_subset(j).size());
    CHECK(size > 380);
    CHECK(size < 620);
  }
}

TEST_CASE("secret space: row regularity across random shapes") {
  std::mt19937_64 gen(12345);
  for (int repeat = 0; repeat < 100; ++repeat) {
    const int n = 1 + static_cast<int>(gen() % 40);
    const int m = 2 * (1 + static_cast<int>(gen() % 16));
    const Universe u = tiny_universe(std::max(n, 1));
    const SecretSpace space = construct_secret_space(u, m, gen());
    for (int i = 0; i < space.num_records(); ++i) {
      CHECK(space.row_count(i) == m / 2);
    }
  }
}

TEST_CASE("secret space: parameter validation and determinism") {
  const Universe u = tiny_universe(3);
  CHECK_THROWS_AS(construct_secret_space(u, 3, 0), InvalidParameterError);
  CHECK_THROWS_AS(construct_secret_space(u, 0, 0), InvalidParameterError);
  const SecretSpace a = construct_secret_space(u, 8, 42);
  const SecretSpace b = construct_secret_space(u, 8, 42);
  CHECK(a.to_json() == b.to_json());
  const SecretSpace c = construct_secret_space(u, 8, 43);
  CHECK(a.to_json() != c.to_json());
}

TEST_CASE("secret space: json round trip") {
  const Universe u = tiny_universe(17);
  const SecretSpace space = construct_secret_space(u, 6, 5);
  const SecretSpace back = SecretSpace::from_json(space.to_json());
  CHECK(back.num_records() == 17);
  CHECK(back.num_subsets() == 6);
  for (int i = 0; i < 17; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(back.contains(i, j) == space.contains(i, j));
    }
  }
}

TEST_CASE("sample_secret: deterministic and roughly uniform") {
  const Universe u = tiny_universe(2);
  const SecretSpace space = construct_secret_space(u, 2, 0);
  CHECK(sample_secret(space, 77) == sample_secret(space, 77));
  int zeros = 0;
  const int draws = 100000;
  for (int seed = 0; seed < draws; ++seed) {
    if (sample_secret(space, seed) == 0) ++zeros;
  }
  const double freq = static_cast<double>(zeros) / draws;
  CHECK(freq > 0.49);
  CHECK(freq < 0.51);
}

TEST_CASE("belief state: uniform init and updates stay normalized") {
  BeliefState belief = BeliefState::uniform(8);
  CHECK(belief.normalization_error() <= 1e-12);
  std::mt19937_64 gen(3);
  NormalSampler noise(4);
  for (int step = 0; step < 2000; ++step) {
    std::vector<double> loglik(8);
    for (double& v : loglik) v = noise.next();
    belief.update(loglik);
    CHECK(belief.normalization_error() <= 1e-12);
  }
  CHECK(belief.step() == 2000);
}

TEST_CASE("belief state: excluded hypothesis never revives") {
  BeliefState belief = BeliefState::uniform(3);
  const double ninf = -std::numeric_limits<double>::infinity();
  belief.update(std::vector<double>{0.0, 0.0, ninf});
  CHECK(belief.probability(2) == 0.0);
  belief.update(std::vector<double>{0.0, 0.0, 100.0});
  CHECK(belief.probability(2) == 0.0);
  CHECK(belief.probability(0) == doctest::Approx(0.5));
}

TEST_CASE("belief state: all-excluded update throws") {
  BeliefState belief = BeliefState::uniform(2);
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(belief.update(std::vector<double>{ninf, ninf}),
                  InvariantViolationError);
}

TEST_CASE("accountant: linearity of tiny uniform budgets") {
  BudgetAccountant acct;
  const double b = std::pow(2.0, -32.0);
  for (int i = 0; i < 1000000; ++i) acct.accumulate(b);
  CHECK(acct.cumulative() == 1000000.0 * b);
  CHECK(acct.cumulative() == doctest::Approx(2.328e-4).epsilon(1e-3));
  CHECK(acct.steps() == 1000000);
}

TEST_CASE("accountant: matches compensated total for random budgets") {
  std::mt19937_64 gen(8);
  NormalSampler s(9);
  BudgetAccountant acct;
  KahanSum oracle;
  for (int i = 0; i < 10000; ++i) {
    const double b = std::exp(-10.0 * s.next_uniform());
    acct.accumulate(b);
    oracle.add(b);
  }
  CHECK(std::abs(acct.cumulative() - oracle.value()) <=
        1e-12 * oracle.value());
}

TEST_CASE("accountant: threshold crossing flags exhaustion") {
  BudgetAccountant acct(std::pow(2.0, -10.0));
  acct.accumulate(std::pow(2.0, -10.0));
  CHECK_FALSE(acct.exhausted());  // B == threshold, not beyond it
  acct.accumulate(std::pow(2.0, -10.0));
  CHECK(acct.exhausted());
}

TEST_CASE("accountant: rejects nonpositive budgets") {
  BudgetAccountant acct;
  CHECK_THROWS_AS(acct.accumulate(0.0), InvalidParameterError);
  CHECK_THROWS_AS(acct.accumulate(-1.0), InvalidParameterError);
}

TEST_CASE("universe csv round trip") {
  const Universe u = tiny_universe(9, 3);
  const std::string path =
      (std::filesystem::temp_directory_path() / "pacpriv_universe.csv").string();
  save_universe_csv(u, path);
  const Universe back = load_universe_csv(path);
  CHECK(back.size() == 9);
  CHECK(back.feature_dim() == 3);
  CHECK(back.num_classes() == 2);
  for (int i = 0; i < 9; ++i) {
    CHECK(back.record(i).features == u.record(i).features);
    CHECK(back.record(i).label == u.record(i).label);
  }
  CHECK(back.content_hash() == u.content_hash());
  std::remove(path.c_str());
}

TEST_CASE("universe csv rejects malformed rows") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "pacpriv_bad.csv").string();
  {
    std::ofstream out(path);
    out << "f0,label\n1.0,abc\n";
  }
  CHECK_THROWS_AS(load_universe_csv(path), DataError);
  {
    std::ofstream out(path);
    out << "f0,label\n1.0,1.5\n";
  }
  CHECK_THROWS_AS(load_universe_csv(path), DataError);
  std::remove(path.c_str());
}
