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

#ifndef PACPRIV_CURATOR_HPP_
#define PACPRIV_CURATOR_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pacpriv/core_types.hpp"
#include "pacpriv/noise.hpp"

namespace pacpriv {

// Public record of one release. Entries are append-only; the stored
// calibration is what lets any party replay the posterior from scratch.
struct TranscriptEntry {
  int step = 0;  // 1-based
  std::string query_id;
  std::shared_ptr<const MechanismMatrix> mechanism;
  NoiseSpec spec;
  Eigen::VectorXd response;
  int label = 0;
  double step_budget = 0.0;
};

using Transcript = std::vector<TranscriptEntry>;

struct QueryResult {
  Eigen::VectorXd response;
  int label = 0;
  NoiseSpec spec;
};

// Sequential release engine: calibrate noise against the current belief,
// release the secret subset's noisy output, fold the release back into the
// belief, and account the budget. Strictly serial; one instance per game.
class Curator {
 public:
  Curator(std::shared_ptr<const SecretSpace> space, int secret_index,
          std::uint64_t master_seed,
          std::optional<double> halt_threshold = {});

  // One full release step. All state (belief, transcript, ledger) commits
  // together; on any failure the curator is unchanged. Throws
  // BudgetExhaustedError once the ledger has crossed its halt threshold.
  QueryResult answer_query(std::shared_ptr<const MechanismMatrix> mech,
                           double step_budget);

  const BeliefState& belief() const { return belief_; }
  const Transcript& transcript() const { return transcript_; }
  const BudgetAccountant& accountant() const { return accountant_; }
  const SecretSpace& space() const { return *space_; }
  std::uint64_t master_seed() const { return master_seed_; }
  int secret_index_for_testing() const { return secret_index_; }

  // Audit-log export, one JSON object per step:
  // {step, query_id, b_t, eigvals, variances, response, label, cum_B,
  //  mia_bound}.
  std::string transcript_jsonl() const;

 private:
  std::shared_ptr<const SecretSpace> space_;
  int secret_index_;
  BeliefState belief_;
  Transcript transcript_;
  BudgetAccountant accountant_;
  std::uint64_t master_seed_;
};

// Test oracle: recomputes the posterior from scratch (prior times every
// stored per-step Gaussian likelihood) and returns the maximum absolute
// probability deviation from the curator's incremental belief.
double belief_oracle_check(const Curator& curator);

// Test oracle: quadrature estimate of the mutual information the next
// release would leak, for noise calibrated against `calibration_belief` but
// measured under `true_belief`. With both equal to the curator's current
// belief this audits one step of the serial mechanism; passing the stale
// prior as `calibration_belief` reproduces the misspecification failure.
double conditional_mi_audit(const MechanismMatrix& mech,
                            const BeliefState& true_belief,
                            const BeliefState& calibration_belief,
                            double step_budget);

}  // namespace pacpriv

#endif  // PACPRIV_CURATOR_HPP_
