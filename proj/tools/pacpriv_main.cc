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

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pacpriv/cli.hpp"
#include "pacpriv/errors.hpp"
#include "pacpriv/service.hpp"

namespace {

using pacpriv::GameConfig;

struct ConfigFlags {
  std::string csv;
  int synthetic_n = 0;
  int synthetic_classes = 3;
  int synthetic_dim = 4;
  double synthetic_sep = 6.0;
  std::uint64_t synthetic_seed = 1;
  int m = 128;
  double step_budget = std::pow(2.0, -32);
  double halt_threshold = 0.0;  // 0 = unlimited
  std::string learner = "nearest_centroid";
  double alpha = 0.01;
  std::uint64_t space_seed = 11, secret_seed = 12, noise_seed = 13,
                 trial_seed = 14, train_seed = 15;
  std::string strategy = "member_replay";
  std::vector<std::int64_t> checkpoints;
  int trials = 20;
  std::int64_t horizon = 200;
  bool score_mode = false;
  int threads = 0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--csv", flags.csv, "universe CSV (features..., label)");
  cmd->add_option("--synthetic-n", flags.synthetic_n,
                  "synthetic universe size (enables synthetic data)");
  cmd->add_option("--synthetic-classes", flags.synthetic_classes);
  cmd->add_option("--synthetic-dim", flags.synthetic_dim);
  cmd->add_option("--synthetic-sep", flags.synthetic_sep);
  cmd->add_option("--synthetic-seed", flags.synthetic_seed);
  cmd->add_option("--m", flags.m, "candidate subset count (even)");
  cmd->add_option("--b", flags.step_budget, "per-query MI budget");
  cmd->add_option("--halt-threshold", flags.halt_threshold,
                  "total MI budget; 0 disables halting");
  cmd->add_option("--learner", flags.learner)
      ->check(CLI::IsMember({"nearest_centroid", "logistic_gd"}));
  cmd->add_option("--alpha", flags.alpha, "confidence filter level");
  cmd->add_option("--space-seed", flags.space_seed);
  cmd->add_option("--secret-seed", flags.secret_seed);
  cmd->add_option("--noise-seed", flags.noise_seed);
  cmd->add_option("--trial-seed", flags.trial_seed);
  cmd->add_option("--train-seed", flags.train_seed);
  cmd->add_option("--strategy", flags.strategy)
      ->check(CLI::IsMember({"member_replay", "random_inputs"}));
  cmd->add_option("--checkpoints", flags.checkpoints,
                  "explicit checkpoint steps");
  cmd->add_option("--trials", flags.trials);
  cmd->add_option("--horizon", flags.horizon, "queries per trial");
  cmd->add_flag("--score-mode", flags.score_mode,
                "privatize probability vectors instead of one-hot labels");
  cmd->add_option("--threads", flags.threads);
}

GameConfig to_config(const ConfigFlags& flags) {
  GameConfig config;
  if (!flags.csv.empty()) config.csv_path = flags.csv;
  if (flags.synthetic_n > 0) {
    config.synthetic = pacpriv::SyntheticSpec{
        flags.synthetic_n, flags.synthetic_classes, flags.synthetic_dim,
        flags.synthetic_sep, flags.synthetic_seed};
  }
  config.m = flags.m;
  config.step_budget = flags.step_budget;
  if (flags.halt_threshold > 0.0) config.halt_threshold = flags.halt_threshold;
  config.learner = pacpriv::learner_kind_from_string(flags.learner);
  config.alpha = flags.alpha;
  config.space_seed = flags.space_seed;
  config.secret_seed = flags.secret_seed;
  config.noise_seed = flags.noise_seed;
  config.trial_seed = flags.trial_seed;
  config.train_seed = flags.train_seed;
  config.strategy = pacpriv::query_strategy_from_string(flags.strategy);
  config.checkpoints = flags.checkpoints;
  config.trials = flags.trials;
  config.horizon = flags.horizon;
  config.score_mode = flags.score_mode;
  config.threads = flags.threads;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC-private classification response service and red-team kit"};
  app.require_subcommand(1);

  // guarantee-table
  auto* table_cmd = app.add_subcommand(
      "guarantee-table", "emit the MI -> MIA-bound guarantee grid as CSV");
  std::vector<double> budgets;
  std::vector<std::int64_t> horizons;
  std::vector<double> dp_epsilons = {1.0, 8.0};
  double dp_delta = 1e-5;
  std::string table_out = "-";
  table_cmd->add_option("--budgets", budgets, "per-step budgets");
  table_cmd->add_option("--horizons", horizons, "response counts");
  table_cmd->add_option("--dp-epsilons", dp_epsilons);
  table_cmd->add_option("--dp-delta", dp_delta);
  table_cmd->add_option("--out", table_out, "output CSV path ('-' = stdout)");

  // build-pool
  auto* pool_cmd =
      app.add_subcommand("build-pool", "construct secret space and model pool");
  ConfigFlags pool_flags;
  std::string pool_out = "pool_out";
  add_config_flags(pool_cmd, pool_flags);
  pool_cmd->add_option("--out", pool_out, "output directory");

  // run-game
  auto* game_cmd = app.add_subcommand(
      "run-game", "Monte Carlo membership-inference game vs the curator");
  ConfigFlags game_flags;
  std::string game_out = "game_out";
  std::string transcripts = "first";
  add_config_flags(game_cmd, game_flags);
  game_cmd->add_option("--out", game_out, "output directory");
  game_cmd->add_option("--transcripts", transcripts, "none|first|all")
      ->check(CLI::IsMember({"none", "first", "all"}));

  // distill
  auto* distill_cmd = app.add_subcommand(
      "distill", "label a public pool privately and export the filtered set");
  ConfigFlags distill_flags;
  std::string distill_pool;
  std::string distill_out = "distill_out";
  bool train_student = false;
  add_config_flags(distill_cmd, distill_flags);
  distill_cmd->add_option("--pool", distill_pool, "unlabeled pool CSV")
      ->required();
  distill_cmd->add_option("--out", distill_out, "output directory");
  distill_cmd->add_flag("--train-student", train_student);

  // serve
  auto* serve_cmd = app.add_subcommand(
      "serve", "line-delimited JSON query service (stdio or local TCP)");
  ConfigFlags serve_flags;
  int serve_port = 0;
  add_config_flags(serve_cmd, serve_flags);
  serve_cmd->add_option("--port", serve_port,
                        "TCP port on 127.0.0.1; omit for stdio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pacpriv::kExitOk : pacpriv::kExitConfigError;
  }

  try {
    if (*table_cmd) {
      if (budgets.empty()) {
        for (int p = 4; p <= 32; p += 4) budgets.push_back(std::pow(2.0, -p));
      }
      if (horizons.empty()) {
        for (std::int64_t t = 1; t <= 1000000; t *= 10) horizons.push_back(t);
      }
      return pacpriv::cmd_guarantee_table(budgets, horizons, dp_epsilons,
                                          dp_delta, table_out);
    }
    if (*pool_cmd) {
      return pacpriv::cmd_build_pool(to_config(pool_flags), pool_out);
    }
    if (*game_cmd) {
      const auto logging = transcripts == "none"
                               ? pacpriv::TranscriptLogging::kNone
                               : (transcripts == "first"
                                      ? pacpriv::TranscriptLogging::kFirstTrial
                                      : pacpriv::TranscriptLogging::kAll);
      return pacpriv::cmd_run_game(to_config(game_flags), game_out, logging);
    }
    if (*distill_cmd) {
      return pacpriv::cmd_distill(to_config(distill_flags), distill_pool,
                                  distill_out, train_student);
    }
    if (*serve_cmd) {
      const GameConfig config = to_config(serve_flags);
      return serve_port > 0 ? pacpriv::serve_tcp(config, serve_port)
                            : pacpriv::serve_stream(config, std::cin, std::cout);
    }
  } catch (const pacpriv::InvalidParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return pacpriv::kExitConfigError;
  } catch (const pacpriv::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return pacpriv::kExitConfigError;
  } catch (const pacpriv::BudgetExhaustedError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return pacpriv::kExitBudgetExhausted;
  } catch (const pacpriv::InvariantViolationError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return pacpriv::kExitInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return pacpriv::kExitOk;
}
