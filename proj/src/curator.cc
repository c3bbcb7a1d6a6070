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

#include "pacpriv/curator.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "pacpriv/accounting.hpp"
#include "pacpriv/errors.hpp"

namespace pacpriv {

namespace {

int argmax_lowest_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

}  // namespace

Curator::Curator(std::shared_ptr<const SecretSpace> space, int secret_index,
                 std::uint64_t master_seed,
                 std::optional<double> halt_threshold)
    : space_(std::move(space)),
      secret_index_(secret_index),
      belief_(BeliefState::uniform(space_ ? space_->num_subsets() : 0)),
      accountant_(halt_threshold),
      master_seed_(master_seed) {
  if (secret_index_ < 0 || secret_index_ >= space_->num_subsets()) {
    throw InvalidParameterError("curator: secret index out of range");
  }
}

QueryResult Curator::answer_query(
    std::shared_ptr<const MechanismMatrix> mech, double step_budget) {
  if (accountant_.exhausted()) {
    throw BudgetExhaustedError(
        "query refused: cumulative mutual information budget exhausted",
        accountant_.cumulative(),
        mia_bound_from_mi(accountant_.cumulative(), 0.5));
  }
  if (!mech || mech->num_subsets() != space_->num_subsets()) {
    throw DataError("answer_query: mechanism rows != subset count");
  }
  if (!(step_budget > 0.0)) {
    throw InvalidParameterError("answer_query: step budget must be positive");
  }

  // Stage everything before touching state so a throw leaves the curator
  // unchanged.
  const int step = static_cast<int>(transcript_.size()) + 1;
  NoiseSpec spec = calibrate(*mech, belief_, step_budget);
  Eigen::VectorXd response =
      mech->outputs.row(secret_index_).transpose() +
      sample_noise(spec, derive_seed(master_seed_, static_cast<std::uint64_t>(step)));
  const int label = argmax_lowest_index(response);
  const std::vector<double> logliks = log_likelihoods(spec, *mech, response);

  BeliefState next_belief = belief_;
  next_belief.update(logliks);

  TranscriptEntry entry;
  entry.step = step;
  entry.query_id = mech->query_id;
  entry.mechanism = mech;
  entry.spec = spec;
  entry.response = response;
  entry.label = label;
  entry.step_budget = step_budget;

  // Commit.
  belief_ = std::move(next_belief);
  transcript_.push_back(std::move(entry));
  accountant_.accumulate(step_budget);

  QueryResult result;
  result.response = std::move(response);
  result.label = label;
  result.spec = std::move(spec);
  return result;
}

std::string Curator::transcript_jsonl() const {
  std::ostringstream out;
  KahanSum cumulative;
  for (const TranscriptEntry& entry : transcript_) {
    cumulative.add(entry.step_budget);
    nlohmann::json line;
    line["step"] = entry.step;
    line["query_id"] = entry.query_id;
    line["b_t"] = entry.step_budget;
    line["eigvals"] = std::vector<double>(
        entry.spec.eigenvalues.data(),
        entry.spec.eigenvalues.data() + entry.spec.eigenvalues.size());
    line["variances"] = std::vector<double>(
        entry.spec.variances.data(),
        entry.spec.variances.data() + entry.spec.variances.size());
    line["response"] = std::vector<double>(
        entry.response.data(), entry.response.data() + entry.response.size());
    line["label"] = entry.label;
    line["cum_B"] = cumulative.value();
    line["mia_bound"] = mia_bound_from_mi(cumulative.value(), 0.5);
    out << line.dump() << "\n";
  }
  return out.str();
}

double belief_oracle_check(const Curator& curator) {
  const int m = curator.space().num_subsets();
  std::vector<double> from_scratch(m,
                                   -std::log(static_cast<double>(m)));
  for (const TranscriptEntry& entry : curator.transcript()) {
    const std::vector<double> logliks =
        log_likelihoods(entry.spec, *entry.mechanism, entry.response);
    for (int s = 0; s < m; ++s) from_scratch[s] += logliks[s];
  }
  const double lse = log_sum_exp(from_scratch);
  double max_dev = 0.0;
  for (int s = 0; s < m; ++s) {
    const double oracle_prob = std::exp(from_scratch[s] - lse);
    max_dev =
        std::max(max_dev, std::abs(oracle_prob - curator.belief().probability(s)));
  }
  return max_dev;
}

double conditional_mi_audit(const MechanismMatrix& mech,
                            const BeliefState& true_belief,
                            const BeliefState& calibration_belief,
                            double step_budget) {
  const NoiseSpec spec = calibrate(mech, calibration_belief, step_budget);
  return verify_mi_bound(mech, true_belief, spec);
}

}  // namespace pacpriv
