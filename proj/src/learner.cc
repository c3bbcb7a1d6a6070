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

#include "pacpriv/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "pacpriv/errors.hpp"

namespace pacpriv {

namespace {

constexpr int kLogisticSteps = 300;
constexpr double kLogisticLearningRate = 0.5;

int argmax_lowest_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

}  // namespace

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "nearest_centroid") return LearnerKind::kNearestCentroid;
  if (name == "logistic_gd") return LearnerKind::kLogisticGd;
  throw InvalidParameterError("unknown learner kind: " + name);
}

std::string learner_kind_to_string(LearnerKind kind) {
  return kind == LearnerKind::kNearestCentroid ? "nearest_centroid"
                                               : "logistic_gd";
}

Eigen::VectorXd Model::scores(const Eigen::VectorXd& query) const {
  if (query.size() != feature_dim) {
    throw DataError("model: query dimension mismatch");
  }
  Eigen::VectorXd s(num_classes);
  if (kind == LearnerKind::kNearestCentroid) {
    for (int c = 0; c < num_classes; ++c) {
      s(c) = class_present[c]
                 ? -(query - centroids.row(c).transpose()).norm()
                 : -std::numeric_limits<double>::infinity();
    }
  } else {
    s = weights * query + biases;
  }
  return s;
}

int Model::predict(const Eigen::VectorXd& query) const {
  return argmax_lowest_index(scores(query));
}

Eigen::VectorXd Model::soft_scores(const Eigen::VectorXd& query) const {
  Eigen::VectorXd s = scores(query);
  const double max = s.maxCoeff();
  Eigen::VectorXd p(num_classes);
  double sum = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    p(c) = std::isfinite(s(c)) ? std::exp(s(c) - max) : 0.0;
    sum += p(c);
  }
  return p / sum;
}

Model train_single(const Universe& universe, const std::vector<int>& indices,
                   LearnerKind kind, std::uint64_t seed) {
  (void)seed;  // both reference learners are seed-free; recorded for identity
  if (indices.empty()) {
    throw DataError("train: empty training subset");
  }
  const int d = universe.num_classes();
  const int dim = universe.feature_dim();
  Model model;
  model.kind = kind;
  model.num_classes = d;
  model.feature_dim = dim;

  if (kind == LearnerKind::kNearestCentroid) {
    model.centroids = Eigen::MatrixXd::Zero(d, dim);
    model.class_present.assign(d, false);
    std::vector<int> counts(d, 0);
    for (int i : indices) {
      const Record& r = universe.record(i);
      model.centroids.row(r.label) += r.features.transpose();
      ++counts[r.label];
    }
    for (int c = 0; c < d; ++c) {
      if (counts[c] > 0) {
        model.centroids.row(c) /= static_cast<double>(counts[c]);
        model.class_present[c] = true;
      }
    }
    return model;
  }

  // Full-batch multinomial logistic regression from zero initialization;
  // a fixed step count keeps training free of any stochastic choice.
  model.class_present.assign(d, true);
  model.weights = Eigen::MatrixXd::Zero(d, dim);
  model.biases = Eigen::VectorXd::Zero(d);
  const int n = static_cast<int>(indices.size());
  Eigen::MatrixXd features(n, dim);
  std::vector<int> labels(n);
  for (int row = 0; row < n; ++row) {
    features.row(row) = universe.record(indices[row]).features.transpose();
    labels[row] = universe.record(indices[row]).label;
  }
  for (int step = 0; step < kLogisticSteps; ++step) {
    Eigen::MatrixXd logits =
        (features * model.weights.transpose()).rowwise() +
        model.biases.transpose();  // n x d
    for (int row = 0; row < n; ++row) {
      const double max = logits.row(row).maxCoeff();
      Eigen::VectorXd p = (logits.row(row).array() - max).exp();
      p /= p.sum();
      p(labels[row]) -= 1.0;
      logits.row(row) = p.transpose();  // reuse as residual
    }
    model.weights -=
        (kLogisticLearningRate / n) * (logits.transpose() * features);
    model.biases -=
        (kLogisticLearningRate / n) * logits.colwise().sum().transpose();
  }
  return model;
}

Model train_full(const Universe& universe, LearnerKind kind,
                 std::uint64_t seed) {
  std::vector<int> all(universe.size());
  for (int i = 0; i < universe.size(); ++i) all[i] = i;
  return train_single(universe, all, kind, seed);
}

ModelPool::ModelPool(std::vector<Model> models, LearnerKind kind,
                     std::uint64_t train_seed, int num_classes,
                     int feature_dim, std::uint64_t universe_hash,
                     std::uint64_t space_seed)
    : models_(std::move(models)),
      kind_(kind),
      train_seed_(train_seed),
      num_classes_(num_classes),
      feature_dim_(feature_dim),
      universe_hash_(universe_hash),
      space_seed_(space_seed) {}

ModelPool train_pool(const Universe& universe, const SecretSpace& space,
                     LearnerKind kind, std::uint64_t train_seed) {
  if (space.num_records() != universe.size()) {
    throw DataError("train_pool: secret space built for a different universe");
  }
  std::vector<Model> models;
  models.reserve(space.num_subsets());
  for (int j = 0; j < space.num_subsets(); ++j) {
    models.push_back(train_single(universe, space.records_in_subset(j), kind,
                                  derive_seed(train_seed, j)));
  }
  return ModelPool(std::move(models), kind, train_seed,
                   universe.num_classes(), universe.feature_dim(),
                   universe.content_hash(), space.seed());
}

MechanismMatrix predict_matrix(const ModelPool& pool,
                               const Eigen::VectorXd& query, bool score_mode) {
  if (query.size() != pool.feature_dim()) {
    throw DataError("predict_matrix: query dimension mismatch");
  }
  MechanismMatrix mech;
  mech.outputs = Eigen::MatrixXd::Zero(pool.size(), pool.num_classes());
  for (int j = 0; j < pool.size(); ++j) {
    if (score_mode) {
      mech.outputs.row(j) = pool.model(j).soft_scores(query).transpose();
    } else {
      mech.outputs(j, pool.model(j).predict(query)) = 1.0;
    }
  }
  return mech;
}

Universe make_synthetic_universe(int n, int num_classes, int feature_dim,
                                 double class_separation, std::uint64_t seed) {
  if (num_classes < 2 || n < 2 * num_classes) {
    throw InvalidParameterError(
        "make_synthetic_universe: need num_classes >= 2 and n >= 2*classes");
  }
  if (feature_dim < num_classes) {
    throw InvalidParameterError(
        "make_synthetic_universe: feature_dim must be >= num_classes");
  }
  if (class_separation < 0.0) {
    throw InvalidParameterError("make_synthetic_universe: negative separation");
  }
  NormalSampler sampler(derive_seed(seed, 0xb10b5));
  std::vector<Record> records;
  records.reserve(n);
  for (int i = 0; i < n; ++i) {
    Record r;
    r.label = i % num_classes;
    r.features = Eigen::VectorXd::Zero(feature_dim);
    for (int k = 0; k < feature_dim; ++k) r.features(k) = sampler.next();
    r.features(r.label) += class_separation;
    records.push_back(std::move(r));
  }
  return Universe(std::move(records), num_classes);
}

double accuracy(const Model& model, const Universe& universe) {
  int correct = 0;
  for (const Record& r : universe.records()) {
    if (model.predict(r.features) == r.label) ++correct;
  }
  return static_cast<double>(correct) / universe.size();
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows;
  for (int r = 0; r < m.rows(); ++r) {
    rows.emplace_back(m.row(r).begin(), m.row(r).end());
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return Eigen::MatrixXd();
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

}  // namespace

std::string ModelPool::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["learner_kind"] = learner_kind_to_string(kind_);
  j["train_seed"] = train_seed_;
  j["num_classes"] = num_classes_;
  j["feature_dim"] = feature_dim_;
  j["universe_hash"] = universe_hash_;
  j["space_seed"] = space_seed_;
  nlohmann::json models = nlohmann::json::array();
  for (const Model& m : models_) {
    nlohmann::json jm;
    if (kind_ == LearnerKind::kNearestCentroid) {
      jm["centroids"] = matrix_to_json(m.centroids);
      jm["class_present"] = m.class_present;
    } else {
      jm["weights"] = matrix_to_json(m.weights);
      jm["biases"] = std::vector<double>(m.biases.data(),
                                         m.biases.data() + m.biases.size());
    }
    models.push_back(std::move(jm));
  }
  j["models"] = std::move(models);
  return j.dump();
}

ModelPool ModelPool::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1) {
    throw DataError("model pool artifact: unsupported version");
  }
  const LearnerKind kind =
      learner_kind_from_string(j.at("learner_kind").get<std::string>());
  const int num_classes = j.at("num_classes").get<int>();
  const int feature_dim = j.at("feature_dim").get<int>();
  std::vector<Model> models;
  for (const auto& jm : j.at("models")) {
    Model m;
    m.kind = kind;
    m.num_classes = num_classes;
    m.feature_dim = feature_dim;
    if (kind == LearnerKind::kNearestCentroid) {
      m.centroids = matrix_from_json(jm.at("centroids"));
      m.class_present = jm.at("class_present").get<std::vector<bool>>();
    } else {
      m.weights = matrix_from_json(jm.at("weights"));
      const auto biases = jm.at("biases").get<std::vector<double>>();
      m.biases = Eigen::Map<const Eigen::VectorXd>(
          biases.data(), static_cast<long>(biases.size()));
      m.class_present.assign(num_classes, true);
    }
    models.push_back(std::move(m));
  }
  return ModelPool(std::move(models), kind, j.at("train_seed").get<std::uint64_t>(),
                   num_classes, feature_dim,
                   j.at("universe_hash").get<std::uint64_t>(),
                   j.at("space_seed").get<std::uint64_t>());
}

void ModelPool::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << to_json();
}

ModelPool ModelPool::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace pacpriv
