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

#include "doctest.h"
#include "pacpriv/errors.hpp"
#include "pacpriv/learner.hpp"

using namespace pacpriv;

namespace {

// Two 1-D-style classes at -1 and +1 embedded in 2-D (the universe loader
// requires feature_dim >= 1; tests use dim 2 to exercise vectors).
Universe two_class_line(int n_per_class) {
  std::vector<Record> records;
  for (int i = 0; i < n_per_class; ++i) {
    Record neg;
    neg.features = Eigen::Vector2d(-1.0, 0.0);
    neg.label = 0;
    Record pos;
    pos.features = Eigen::Vector2d(1.0, 0.0);
    pos.label = 1;
    records.push_back(neg);
    records.push_back(pos);
  }
  return Universe(std::move(records), 2);
}

}  // namespace

TEST_CASE("nearest centroid separable two-class example") {
  const Universe u = two_class_line(8);
  const SecretSpace space = construct_secret_space(u, 4, 3);
  const ModelPool pool =
      train_pool(u, space, LearnerKind::kNearestCentroid, 0);
  for (int j = 0; j < pool.size(); ++j) {
    CHECK(pool.model(j).centroids(0, 0) == doctest::Approx(-1.0));
    CHECK(pool.model(j).centroids(1, 0) == doctest::Approx(1.0));
  }
  const MechanismMatrix mech =
      predict_matrix(pool, Eigen::Vector2d(2.0, 0.0));
  for (int j = 0; j < pool.size(); ++j) {
    CHECK(mech.outputs(j, 0) == 0.0);
    CHECK(mech.outputs(j, 1) == 1.0);
  }
}

TEST_CASE("pool retrains byte-identically") {
  const Universe u = make_synthetic_universe(120, 3, 4, 5.0, 21);
  const SecretSpace space = construct_secret_space(u, 8, 5);
  for (LearnerKind kind :
       {LearnerKind::kNearestCentroid, LearnerKind::kLogisticGd}) {
    const ModelPool a = train_pool(u, space, kind, 9);
    const ModelPool b = train_pool(u, space, kind, 9);
    CHECK(a.to_json() == b.to_json());
  }
}

TEST_CASE("pool artifacts round trip") {
  const Universe u = make_synthetic_universe(60, 2, 3, 4.0, 2);
  const SecretSpace space = construct_secret_space(u, 4, 1);
  for (LearnerKind kind :
       {LearnerKind::kNearestCentroid, LearnerKind::kLogisticGd}) {
    const ModelPool pool = train_pool(u, space, kind, 7);
    const ModelPool back = ModelPool::from_json(pool.to_json());
    CHECK(back.to_json() == pool.to_json());
    CHECK(back.universe_hash() == u.content_hash());
    // identical predictions after reload
    for (int i = 0; i < u.size(); ++i) {
      for (int j = 0; j < pool.size(); ++j) {
        CHECK(back.model(j).predict(u.record(i).features) ==
              pool.model(j).predict(u.record(i).features));
      }
    }
  }
}

TEST_CASE("every pool member stays close to the full-data model") {
  const Universe train = make_synthetic_universe(600, 3, 4, 6.0, 31);
  const Universe held_out = make_synthetic_universe(600, 3, 4, 6.0, 32);
  const SecretSpace space = construct_secret_space(train, 8, 11);
  for (LearnerKind kind :
       {LearnerKind::kNearestCentroid, LearnerKind::kLogisticGd}) {
    const Model full = train_full(train, kind, 0);
    const double full_acc = accuracy(full, held_out);
    const ModelPool pool = train_pool(train, space, kind, 0);
    for (int j = 0; j < pool.size(); ++j) {
      const double member_acc = accuracy(pool.model(j), held_out);
      CHECK(member_acc >= full_acc - 0.05);
    }
  }
}

TEST_CASE("absent class is never predicted by nearest centroid") {
  // Class 1 appears once; build a subset without it by hand.
  std::vector<Record> records;
  for (int i = 0; i < 6; ++i) {
    Record r;
    r.features = Eigen::Vector2d(i, 0.0);
    r.label = 0;
    records.push_back(r);
  }
  Record odd;
  odd.features = Eigen::Vector2d(100.0, 0.0);
  odd.label = 1;
  records.push_back(odd);
  const Universe u(std::move(records), 2);
  const Model model = train_single(u, {0, 1, 2}, LearnerKind::kNearestCentroid, 0);
  CHECK_FALSE(model.class_present[1]);
  // even a query sitting on the absent class's location is never class 1
  CHECK(model.predict(Eigen::Vector2d(100.0, 0.0)) == 0);
  const Eigen::VectorXd soft = model.soft_scores(Eigen::Vector2d(100.0, 0.0));
  CHECK(soft(1) == 0.0);
  CHECK(soft.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty training subset is an error") {
  const Universe u = two_class_line(2);
  CHECK_THROWS_AS(train_single(u, {}, LearnerKind::kNearestCentroid, 0),
                  DataError);
}

TEST_CASE("predict_matrix rows are exact one-hots in hard mode") {
  const Universe u = make_synthetic_universe(90, 3, 4, 3.0, 77);
  const SecretSpace space = construct_secret_space(u, 6, 3);
  const ModelPool pool = train_pool(u, space, LearnerKind::kNearestCentroid, 0);
  for (int i = 0; i < 20; ++i) {
    const MechanismMatrix mech = predict_matrix(pool, u.record(i).features);
    for (int j = 0; j < mech.num_subsets(); ++j) {
      int ones = 0;
      for (int c = 0; c < mech.output_dim(); ++c) {
        CHECK((mech.outputs(j, c) == 0.0 || mech.outputs(j, c) == 1.0));
        if (mech.outputs(j, c) == 1.0) ++ones;
      }
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("predict_matrix boundary query splits by centroid midpoint") {
  // Classes at -1 and +1 with one stray +3 point shift some subsets'
  // positive centroid, moving their decision boundary off zero.
  std::vector<Record> records;
  for (int i = 0; i < 4; ++i) {
    Record neg;
    neg.features = Eigen::Vector2d(-1.0, 0.0);
    neg.label = 0;
    records.push_back(neg);
  }
  for (int i = 0; i < 3; ++i) {
    Record pos;
    pos.features = Eigen::Vector2d(1.0, 0.0);
    pos.label = 1;
    records.push_back(pos);
  }
  Record stray;
  stray.features = Eigen::Vector2d(3.0, 0.0);
  stray.label = 1;
  records.push_back(stray);
  const Universe u(std::move(records), 2);
  const SecretSpace space = construct_secret_space(u, 8, 13);
  const ModelPool pool = train_pool(u, space, LearnerKind::kNearestCentroid, 0);

  const Eigen::Vector2d query(0.3, 0.0);
  const MechanismMatrix mech = predict_matrix(pool, query);
  for (int j = 0; j < pool.size(); ++j) {
    // per-model oracle: nearest centroid by hand
    const Model& model = pool.model(j);
    int expected;
    if (!model.class_present[0]) {
      expected = 1;
    } else if (!model.class_present[1]) {
      expected = 0;
    } else {
      const double d0 = (query - model.centroids.row(0).transpose()).norm();
      const double d1 = (query - model.centroids.row(1).transpose()).norm();
      expected = d1 < d0 ? 1 : 0;
    }
    CHECK(mech.outputs(j, expected) == 1.0);
  }
}

TEST_CASE("score mode rows are probability vectors") {
  const Universe u = make_synthetic_universe(90, 3, 4, 2.0, 5);
  const SecretSpace space = construct_secret_space(u, 6, 2);
  for (LearnerKind kind :
       {LearnerKind::kNearestCentroid, LearnerKind::kLogisticGd}) {
    const ModelPool pool = train_pool(u, space, kind, 0);
    const MechanismMatrix mech =
        predict_matrix(pool, u.record(0).features, /*score_mode=*/true);
    for (int j = 0; j < mech.num_subsets(); ++j) {
      CHECK(mech.outputs.row(j).sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(mech.outputs.row(j).minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("synthetic universe: separation controls accuracy") {
  const Universe wide = make_synthetic_universe(400, 4, 5, 10.0, 8);
  const Universe wide_test = make_synthetic_universe(400, 4, 5, 10.0, 9);
  const Model model = train_full(wide, LearnerKind::kNearestCentroid, 0);
  CHECK(accuracy(model, wide_test) >= 0.99);

  const Universe flat = make_synthetic_universe(2000, 4, 5, 0.0, 8);
  const Universe flat_test = make_synthetic_universe(2000, 4, 5, 0.0, 9);
  const Model flat_model = train_full(flat, LearnerKind::kNearestCentroid, 0);
  const double chance = accuracy(flat_model, flat_test);
  CHECK(chance >= 0.25 - 0.03);
  CHECK(chance <= 0.25 + 0.03);
}

TEST_CASE("synthetic universe: deterministic and validated") {
  const Universe a = make_synthetic_universe(50, 2, 3, 1.0, 4);
  const Universe b = make_synthetic_universe(50, 2, 3, 1.0, 4);
  CHECK(a.content_hash() == b.content_hash());
  CHECK_THROWS_AS(make_synthetic_universe(3, 2, 3, 1.0, 4),
                  InvalidParameterError);
  CHECK_THROWS_AS(make_synthetic_universe(50, 4, 3, 1.0, 4),
                  InvalidParameterError);
}

TEST_CASE("logistic learner separates shifted blobs") {
  const Universe train = make_synthetic_universe(300, 2, 3, 4.0, 15);
  const Universe test = make_synthetic_universe(300, 2, 3, 4.0, 16);
  const Model model = train_full(train, LearnerKind::kLogisticGd, 0);
  CHECK(accuracy(model, test) >= 0.97);
}
