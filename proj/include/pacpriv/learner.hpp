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

#ifndef PACPRIV_LEARNER_HPP_
#define PACPRIV_LEARNER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pacpriv/core_types.hpp"
#include "pacpriv/noise.hpp"

namespace pacpriv {

enum class LearnerKind { kNearestCentroid, kLogisticGd };

LearnerKind learner_kind_from_string(const std::string& name);
std::string learner_kind_to_string(LearnerKind kind);

// A trained classifier. Per-class scores; classes that never appeared in
// the training subset score -inf and can never win.
struct Model {
  LearnerKind kind = LearnerKind::kNearestCentroid;
  int num_classes = 0;
  int feature_dim = 0;

  // Nearest centroid: one mean per class; `class_present[c]` false when the
  // class was absent from the training subset.
  Eigen::MatrixXd centroids;  // num_classes x feature_dim
  std::vector<bool> class_present;

  // Logistic: weights (num_classes x feature_dim) and biases.
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;

  Eigen::VectorXd scores(const Eigen::VectorXd& query) const;
  int predict(const Eigen::VectorXd& query) const;  // lowest-index tie break
  Eigen::VectorXd soft_scores(const Eigen::VectorXd& query) const;  // softmax
};

// One model per candidate subset, trained offline so that serving a query
// reduces to m inference calls.
class ModelPool {
 public:
  ModelPool(std::vector<Model> models, LearnerKind kind,
            std::uint64_t train_seed, int num_classes, int feature_dim,
            std::uint64_t universe_hash, std::uint64_t space_seed);

  int size() const { return static_cast<int>(models_.size()); }
  int num_classes() const { return num_classes_; }
  int feature_dim() const { return feature_dim_; }
  LearnerKind kind() const { return kind_; }
  std::uint64_t train_seed() const { return train_seed_; }
  std::uint64_t universe_hash() const { return universe_hash_; }
  const Model& model(int j) const { return models_.at(j); }

  std::string to_json() const;
  static ModelPool from_json(const std::string& text);
  void save(const std::string& path) const;
  static ModelPool load(const std::string& path);

 private:
  std::vector<Model> models_;
  LearnerKind kind_;
  std::uint64_t train_seed_;
  int num_classes_;
  int feature_dim_;
  std::uint64_t universe_hash_;
  std::uint64_t space_seed_;
};

// Trains a model on an explicit list of record indices. Fully deterministic
// in (records, kind, seed).
Model train_single(const Universe& universe, const std::vector<int>& indices,
                   LearnerKind kind, std::uint64_t seed);

// Convenience: train on every record.
Model train_full(const Universe& universe, LearnerKind kind,
                 std::uint64_t seed);

// Trains one model per subset of the secret space.
ModelPool train_pool(const Universe& universe, const SecretSpace& space,
                     LearnerKind kind, std::uint64_t train_seed);

// The per-query mechanism: row j is model j's prediction for `query` as an
// exact one-hot vector (hard mode) or a softmax probability vector
// (score mode, kept for the stability comparison experiments).
MechanismMatrix predict_matrix(const ModelPool& pool,
                               const Eigen::VectorXd& query,
                               bool score_mode = false);

// Gaussian blobs with class means at the corners of a scaled simplex
// (separation * e_k) and unit covariance; labels cycle round-robin so every
// class appears. Deterministic in the seed. Requires feature_dim >= classes.
Universe make_synthetic_universe(int n, int num_classes, int feature_dim,
                                 double class_separation, std::uint64_t seed);

// Fraction of correct predictions of `model` on `universe`.
double accuracy(const Model& model, const Universe& universe);

}  // namespace pacpriv

#endif  // PACPRIV_LEARNER_HPP_
