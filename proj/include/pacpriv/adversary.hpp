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

#ifndef PACPRIV_ADVERSARY_HPP_
#define PACPRIV_ADVERSARY_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pacpriv/core_types.hpp"
#include "pacpriv/curator.hpp"
#include "pacpriv/learner.hpp"
#include "pacpriv/noise.hpp"

namespace pacpriv {

// The informed adversary: sees everything the curator publishes (mechanism,
// calibration, response) and mirrors the same Bayesian update, so its belief
// tracks the curator's exactly.
class Adversary {
 public:
  explicit Adversary(std::shared_ptr<const SecretSpace> space);

  void observe(const MechanismMatrix& mech, const NoiseSpec& spec,
               const Eigen::VectorXd& response);

  // Bayes-optimal membership call for one record: 1 iff the posterior
  // membership probability strictly exceeds 1/2.
  int decide_membership(int record) const;

  // Posterior membership probability of one record.
  double membership_probability(int record) const;

  const BeliefState& belief() const { return belief_; }

 private:
  std::shared_ptr<const SecretSpace> space_;
  BeliefState belief_;
};

enum class QueryStrategy { kMemberReplay, kRandomInputs };

QueryStrategy query_strategy_from_string(const std::string& name);
std::string query_strategy_to_string(QueryStrategy strategy);

struct GameSettings {
  double step_budget = 0.0;
  std::optional<double> halt_threshold;
  std::int64_t horizon = 0;
  int trials = 1;
  QueryStrategy strategy = QueryStrategy::kMemberReplay;
  std::vector<std::int64_t> checkpoints;  // empty -> log-spaced up to horizon
  bool score_mode = false;
  std::uint64_t secret_seed = 1;
  std::uint64_t noise_seed = 2;
  std::uint64_t trial_seed = 3;
  int threads = 0;  // 0 -> hardware choice
  // When set, a summary accuracy above bound + 3 standard errors aborts
  // report generation with InvariantViolationError.
  bool verify_bound = true;
  // Called as each trial finishes (possibly from a worker thread); the CLI
  // uses it to export per-trial audit logs. Must be thread-safe.
  std::function<void(int trial, const Curator& curator)> on_trial_done;
};

struct GameReport {
  struct Row {
    int trial = 0;
    std::int64_t checkpoint = 0;
    double empirical_acc = 0.0;
    double theoretical_bound = 0.0;
    double cumulative_mi = 0.0;
  };
  struct Summary {
    std::int64_t checkpoint = 0;
    int trials = 0;
    double mean_acc = 0.0;
    double std_error = 0.0;
    double theoretical_bound = 0.0;
  };

  std::vector<Row> rows;
  std::vector<Summary> summaries;
  std::vector<int> halted_trials;

  // Columns: trial,checkpoint_T,empirical_acc,theoretical_bound,cum_B_bits.
  std::string to_csv() const;
  // Columns: checkpoint_T,trials,mean_acc,std_error,theoretical_bound.
  std::string summary_csv() const;
};

// Monte Carlo membership game: independent trials, each with its own secret
// and noise stream; the adversary replays universe records (or random
// inputs) and calls membership for every record at each checkpoint.
GameReport run_game(const Universe& universe,
                    std::shared_ptr<const SecretSpace> space,
                    const ModelPool& pool, const GameSettings& settings);

std::vector<std::int64_t> default_checkpoints(std::int64_t horizon);

}  // namespace pacpriv

#endif  // PACPRIV_ADVERSARY_HPP_
