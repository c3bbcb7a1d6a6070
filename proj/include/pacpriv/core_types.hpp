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

#ifndef PACPRIV_CORE_TYPES_HPP_
#define PACPRIV_CORE_TYPES_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacpriv/mathutil.hpp"

namespace pacpriv {

// The finite pool of records the membership game is played over. Feature
// vectors share one dimension; labels lie in {0, ..., num_classes-1}.
struct Record {
  Eigen::VectorXd features;
  int label = 0;
};

class Universe {
 public:
  Universe(std::vector<Record> records, int num_classes);

  int size() const { return static_cast<int>(records_.size()); }
  int feature_dim() const { return feature_dim_; }
  int num_classes() const { return num_classes_; }
  const Record& record(int i) const { return records_.at(i); }
  const std::vector<Record>& records() const { return records_; }

  // Stable fingerprint of the record contents (IEEE bit patterns), used to
  // key model-pool artifacts.
  std::uint64_t content_hash() const;

 private:
  std::vector<Record> records_;
  int feature_dim_;
  int num_classes_;
};

// Loads a universe from CSV: header row required, numeric feature columns,
// final column an integer class label.
Universe load_universe_csv(const std::string& path);
void save_universe_csv(const Universe& universe, const std::string& path);

// The candidate-subset game board: n x m membership matrix in which every
// record belongs to exactly m/2 of the m subsets, so each record's marginal
// inclusion probability is exactly 1/2 under the uniform prior over subsets.
class SecretSpace {
 public:
  int num_records() const { return n_; }
  int num_subsets() const { return m_; }
  std::uint64_t seed() const { return seed_; }

  bool contains(int record, int subset) const {
    return membership_[static_cast<std::size_t>(record) * m_ + subset] != 0;
  }
  // Record indices belonging to subset j, in record order.
  std::vector<int> records_in_subset(int subset) const;
  int row_count(int record) const;

  // Uniform prior over the m subsets.
  double prior(int /*subset*/) const { return 1.0 / m_; }

  std::string to_json() const;
  static SecretSpace from_json(const std::string& text);
  void save(const std::string& path) const;
  static SecretSpace load(const std::string& path);

  friend SecretSpace construct_secret_space(const Universe& universe, int m,
                                            std::uint64_t seed);

 private:
  SecretSpace() = default;

  int n_ = 0;
  int m_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> membership_;  // row-major n x m
};

// Assigns each record to exactly m/2 subsets chosen by a seeded partial
// Fisher-Yates shuffle of {0, ..., m-1}. Deterministic in (universe, m, seed).
SecretSpace construct_secret_space(const Universe& universe, int m,
                                   std::uint64_t seed);

// Uniform draw of the realized secret subset; fixed for the life of a game.
int sample_secret(const SecretSpace& space, std::uint64_t seed);

// Log-domain posterior over the m candidate subsets, renormalized after
// every update so logsumexp stays at 0. A hypothesis driven to probability
// zero (-inf) never becomes live again.
class BeliefState {
 public:
  static BeliefState uniform(int m);
  static BeliefState from_log_weights(std::vector<double> log_weights,
                                      int step = 0);

  int size() const { return static_cast<int>(log_weights_.size()); }
  int step() const { return step_; }
  const std::vector<double>& log_weights() const { return log_weights_; }
  double log_weight(int j) const { return log_weights_.at(j); }
  double probability(int j) const;
  std::vector<double> probabilities() const;

  // Bayes step: adds per-subset log-likelihoods and renormalizes.
  void update(std::span<const double> log_likelihoods);

  // |logsumexp(log_weights)|, which the invariants keep at <= 1e-12.
  double normalization_error() const;

 private:
  std::vector<double> log_weights_;
  int step_ = 0;
};

// Linear mutual-information ledger: B accumulates the per-step budgets
// (compensated summation), optionally halting once a threshold is crossed.
class BudgetAccountant {
 public:
  explicit BudgetAccountant(std::optional<double> halt_threshold = {});

  // Adds one step of budget b_t > 0. Flags exhaustion once the cumulative
  // total strictly exceeds the halt threshold.
  void accumulate(double b_t);

  double cumulative() const { return total_.value(); }
  std::int64_t steps() const { return steps_; }
  bool exhausted() const { return exhausted_; }
  std::optional<double> halt_threshold() const { return halt_threshold_; }

 private:
  KahanSum total_;
  std::int64_t steps_ = 0;
  bool exhausted_ = false;
  std::optional<double> halt_threshold_;
};

}  // namespace pacpriv

#endif  // PACPRIV_CORE_TYPES_HPP_
