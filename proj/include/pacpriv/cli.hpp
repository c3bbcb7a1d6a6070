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

#ifndef PACPRIV_CLI_HPP_
#define PACPRIV_CLI_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacpriv/adversary.hpp"
#include "pacpriv/core_types.hpp"
#include "pacpriv/learner.hpp"

namespace pacpriv {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBudgetExhausted = 3;
inline constexpr int kExitInvariantViolation = 4;

struct SyntheticSpec {
  int n = 0;
  int num_classes = 0;
  int feature_dim = 0;
  double separation = 0.0;
  std::uint64_t seed = 0;
};

// Full description of one run. Serializes canonically (sorted keys, shortest
// round-trip numbers), so the hash identifies the run.
struct GameConfig {
  std::optional<std::string> csv_path;
  std::optional<SyntheticSpec> synthetic;
  int m = 128;
  double step_budget = 0.0;
  std::optional<double> halt_threshold;
  LearnerKind learner = LearnerKind::kNearestCentroid;
  double alpha = 0.01;
  std::uint64_t space_seed = 11;
  std::uint64_t secret_seed = 12;
  std::uint64_t noise_seed = 13;
  std::uint64_t trial_seed = 14;
  std::uint64_t train_seed = 15;
  QueryStrategy strategy = QueryStrategy::kMemberReplay;
  std::vector<std::int64_t> checkpoints;
  int trials = 20;
  std::int64_t horizon = 200;
  bool score_mode = false;
  int threads = 0;

  std::string canonical_json() const;
  std::string hash() const;  // hex fnv1a64 of canonical_json()
  static GameConfig from_json(const std::string& text);

  GameSettings game_settings() const;
};

Universe build_universe(const GameConfig& config);

// Loads an unlabeled query pool: header row plus feature columns; a trailing
// extra column (labels from a labeled export) is ignored.
std::vector<Eigen::VectorXd> load_query_pool_csv(const std::string& path,
                                                 int feature_dim);

enum class TranscriptLogging { kNone, kFirstTrial, kAll };

// Subcommand bodies. Each returns a process exit code and writes artifacts
// under `out_dir` (created if missing).
int cmd_guarantee_table(const std::vector<double>& step_budgets,
                        const std::vector<std::int64_t>& horizons,
                        const std::vector<double>& dp_epsilons, double dp_delta,
                        const std::string& out_path);

int cmd_build_pool(const GameConfig& config, const std::string& out_dir);

int cmd_run_game(const GameConfig& config, const std::string& out_dir,
                 TranscriptLogging logging);

int cmd_distill(const GameConfig& config, const std::string& pool_csv,
                const std::string& out_dir, bool train_student);

}  // namespace pacpriv

#endif  // PACPRIV_CLI_HPP_
