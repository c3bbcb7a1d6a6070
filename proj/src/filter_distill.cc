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

#include "pacpriv/filter_distill.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "pacpriv/accounting.hpp"
#include "pacpriv/errors.hpp"

namespace pacpriv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fraction of |e_win - e_alt|^2 that must live in noisy directions for the
// Gaussian statistic to be meaningful; below this the comparison is treated
// as noiseless.
constexpr double kDegenerateMassRel = 1e-18;

int argmax_lowest_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

double test_statistic(const Eigen::VectorXd& response, const NoiseSpec& spec,
                      int winner, int alternative) {
  const int d = spec.dim();
  if (response.size() != d || winner < 0 || winner >= d || alternative < 0 ||
      alternative >= d || winner == alternative) {
    throw DataError("test_statistic: bad dimensions or class indices");
  }
  Eigen::VectorXd direction = Eigen::VectorXd::Zero(d);
  direction(winner) = 1.0;
  direction(alternative) = -1.0;
  const Eigen::VectorXd diff = response - Eigen::VectorXd::Unit(d, alternative);

  const Eigen::VectorXd dir_proj = spec.basis.transpose() * direction;
  const Eigen::VectorXd diff_proj = spec.basis.transpose() * diff;

  double numerator = 0.0;
  double quad = 0.0;
  double active_mass = 0.0;
  double null_signed = 0.0;
  for (int i = 0; i < d; ++i) {
    if (spec.variances(i) > 0.0) {
      numerator += dir_proj(i) * diff_proj(i) / spec.variances(i);
      quad += dir_proj(i) * dir_proj(i) / spec.variances(i);
      active_mass += dir_proj(i) * dir_proj(i);
    } else {
      null_signed += dir_proj(i) * diff_proj(i);
    }
  }

  if (active_mass <= kDegenerateMassRel * direction.squaredNorm()) {
    // Noiseless comparison: the response must side with the winner exactly.
    return null_signed / direction.norm() > kZeroDirectionTol ? kInf : -kInf;
  }
  return numerator / std::sqrt(quad);
}

FilterDecision filter_response(const Eigen::VectorXd& response,
                               const NoiseSpec& spec, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameterError("filter_response: alpha must lie in (0, 1)");
  }
  if (response.size() != spec.dim()) {
    throw DataError("filter_response: dimension mismatch");
  }
  FilterDecision decision;
  decision.noisy_label = argmax_lowest_index(response);
  decision.threshold = normal_quantile(1.0 - alpha);
  decision.min_statistic = kInf;
  for (int j = 0; j < spec.dim(); ++j) {
    if (j == decision.noisy_label) continue;
    decision.min_statistic =
        std::min(decision.min_statistic,
                 test_statistic(response, spec, decision.noisy_label, j));
  }
  decision.retained = decision.min_statistic >= decision.threshold;
  return decision;
}

double false_retain_rate(const NoiseSpec& spec, int true_label, double alpha,
                         int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidParameterError("false_retain_rate: trials >= 1");
  const int d = spec.dim();
  if (true_label < 0 || true_label >= d) {
    throw InvalidParameterError("false_retain_rate: label out of range");
  }
  const Eigen::VectorXd signal = Eigen::VectorXd::Unit(d, true_label);
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const Eigen::VectorXd response =
        signal + sample_noise(spec, derive_seed(seed, k));
    const FilterDecision decision = filter_response(response, spec, alpha);
    if (decision.noisy_label != true_label && decision.retained) ++bad;
  }
  return static_cast<double>(bad) / trials;
}

std::vector<double> null_statistic_samples(const NoiseSpec& spec,
                                           int true_label, int alternative,
                                           int count, std::uint64_t seed) {
  const int d = spec.dim();
  const Eigen::VectorXd signal = Eigen::VectorXd::Unit(d, true_label);
  std::vector<double> samples;
  samples.reserve(count);
  for (int k = 0; k < count; ++k) {
    const Eigen::VectorXd response =
        signal + sample_noise(spec, derive_seed(seed, k));
    // Fixed pair (alternative vs true): exactly N(0,1) under the noise law.
    samples.push_back(
        test_statistic(response, spec, alternative, true_label));
  }
  return samples;
}

double DistillationSet::mia_bound() const {
  return mia_bound_from_mi(cumulative_mi, 0.5);
}

DistillationSet label_and_filter(Curator& curator, const ModelPool& pool,
                                 const std::vector<Eigen::VectorXd>& queries,
                                 double alpha, double step_budget) {
  DistillationSet set;
  set.alpha = alpha;
  set.step_budget = step_budget;
  set.class_counts.assign(pool.num_classes(), 0);
  for (const Eigen::VectorXd& query : queries) {
    auto mech = std::make_shared<MechanismMatrix>(predict_matrix(pool, query));
    mech->query_id = "pub" + std::to_string(set.queries_submitted);
    QueryResult result;
    try {
      result = curator.answer_query(mech, step_budget);
    } catch (const BudgetExhaustedError&) {
      set.truncated = true;
      break;
    }
    ++set.queries_submitted;
    FilterDecision decision = filter_response(result.response, result.spec, alpha);
    decision.query_id = mech->query_id;
    set.all_labeled.push_back({query, decision.noisy_label});
    if (decision.retained) {
      set.retained.push_back({query, decision.noisy_label});
      ++set.class_counts[decision.noisy_label];
    }
    set.decisions.push_back(std::move(decision));
  }
  set.cumulative_mi = curator.accountant().cumulative();
  return set;
}

void write_distillation_csv(const DistillationSet& set,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  const int dim =
      set.retained.empty()
          ? (set.all_labeled.empty()
                 ? 0
                 : static_cast<int>(set.all_labeled.front().features.size()))
          : static_cast<int>(set.retained.front().features.size());
  for (int k = 0; k < dim; ++k) out << "f" << k << ",";
  out << "label\n";
  for (const LabeledExample& row : set.retained) {
    for (int k = 0; k < dim; ++k) out << format_double(row.features(k)) << ",";
    out << row.label << "\n";
  }
}

std::string distillation_manifest(const DistillationSet& set, double dp_delta) {
  nlohmann::json j;
  j["alpha"] = set.alpha;
  j["step_budget"] = set.step_budget;
  j["queries_submitted"] = set.queries_submitted;
  j["retained"] = static_cast<std::int64_t>(set.retained.size());
  j["truncated"] = set.truncated;
  j["cumulative_mi"] = set.cumulative_mi;
  const double bound = set.mia_bound();
  j["mia_bound_pct"] = 100.0 * bound;
  j["dp_delta"] = dp_delta;
  j["dp_epsilon_equiv"] = dp_epsilon_or_zero(bound, dp_delta);
  j["class_counts"] = set.class_counts;
  return j.dump(2);
}

Universe universe_from_examples(const std::vector<LabeledExample>& rows,
                                int num_classes) {
  if (rows.empty()) throw DataError("universe_from_examples: no rows");
  std::vector<Record> records;
  records.reserve(rows.size());
  for (const LabeledExample& row : rows) {
    records.push_back({row.features, row.label});
  }
  return Universe(std::move(records), num_classes);
}

}  // namespace pacpriv
