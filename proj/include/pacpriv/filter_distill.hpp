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

#ifndef PACPRIV_FILTER_DISTILL_HPP_
#define PACPRIV_FILTER_DISTILL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pacpriv/curator.hpp"
#include "pacpriv/learner.hpp"
#include "pacpriv/noise.hpp"

namespace pacpriv {

// Outcome of the per-response hypothesis test: the noisy label is kept only
// when every alternative class is rejected at level alpha.
struct FilterDecision {
  std::string query_id;
  int noisy_label = 0;
  // min over alternatives of the normalized test statistic; degenerate
  // (noiseless) alternatives enter as +inf when they pass and -inf when
  // they fail, so retained <=> min_statistic >= threshold always holds.
  double min_statistic = 0.0;
  double threshold = 0.0;
  bool retained = false;
};

// The normalized two-class statistic
//   (e_win - e_alt)^T S^+ (r - e_alt) / sqrt((e_win - e_alt)^T S^+ (e_win - e_alt))
// computed in the calibration eigenbasis with pseudo-inverse semantics
// (zero-variance directions excluded). Returns +/-inf for the degenerate
// noiseless comparison described at filter_response.
double test_statistic(const Eigen::VectorXd& response, const NoiseSpec& spec,
                      int winner, int alternative);

// Tests the argmax label of `response` against every alternative class at
// significance alpha. When an alternative differs from the winner only in
// zero-variance directions the Gaussian test degenerates and the decision
// falls back to exact comparison: the alternative is rejected iff the
// response sides with the winner beyond kZeroDirectionTol.
FilterDecision filter_response(const Eigen::VectorXd& response,
                               const NoiseSpec& spec, double alpha);

// Monte Carlo test oracle: fraction of draws r = e_true + noise whose argmax
// label flips away from `true_label` yet passes the filter.
double false_retain_rate(const NoiseSpec& spec, int true_label, double alpha,
                         int trials, std::uint64_t seed = 2024);

// Test oracle for the null distribution: samples of the fixed-pair
// statistic with r = e_true + noise, which is exactly standard normal.
std::vector<double> null_statistic_samples(const NoiseSpec& spec,
                                           int true_label, int alternative,
                                           int count, std::uint64_t seed);

struct LabeledExample {
  Eigen::VectorXd features;
  int label = 0;
};

// A finished private-labeling run over a public pool.
struct DistillationSet {
  std::vector<LabeledExample> retained;
  std::vector<LabeledExample> all_labeled;  // unfiltered, for baselines
  std::vector<FilterDecision> decisions;
  double alpha = 0.0;
  double step_budget = 0.0;
  std::int64_t queries_submitted = 0;
  bool truncated = false;     // budget ran out before the pool was exhausted
  double cumulative_mi = 0.0;
  std::vector<std::int64_t> class_counts;  // retained rows per class

  double mia_bound() const;
};

// Streams the pool through the curator at the given per-query budget,
// filtering each noisy response. Stops early (truncated = true) if the
// ledger halts.
DistillationSet label_and_filter(Curator& curator, const ModelPool& pool,
                                 const std::vector<Eigen::VectorXd>& queries,
                                 double alpha, double step_budget);

// CSV of (features..., label) for retained rows only.
void write_distillation_csv(const DistillationSet& set,
                            const std::string& path);

// JSON manifest: the audit trail a released student model carries
// (alpha, budget arithmetic, guarantee, class counts, truncation flag).
std::string distillation_manifest(const DistillationSet& set,
                                  double dp_delta = 1e-5);

// Builds a universe from labeled rows so the student reuses the standard
// trainers. Throws DataError when `rows` is empty.
Universe universe_from_examples(const std::vector<LabeledExample>& rows,
                                int num_classes);

}  // namespace pacpriv

#endif  // PACPRIV_FILTER_DISTILL_HPP_
