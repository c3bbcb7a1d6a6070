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

#include "pacpriv/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "pacpriv/accounting.hpp"
#include "pacpriv/errors.hpp"
#include "pacpriv/filter_distill.hpp"

namespace pacpriv {

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << content;
}

std::string log_directory(const std::string& out_dir) {
  if (const char* env = std::getenv("PACPRIV_LOG_DIR")) {
    if (*env != '\0') return env;
  }
  return out_dir;
}

}  // namespace

std::string GameConfig::canonical_json() const {
  nlohmann::json j;
  if (csv_path) j["csv_path"] = *csv_path;
  if (synthetic) {
    j["synthetic"] = {{"n", synthetic->n},
                      {"num_classes", synthetic->num_classes},
                      {"feature_dim", synthetic->feature_dim},
                      {"separation", synthetic->separation},
                      {"seed", synthetic->seed}};
  }
  j["m"] = m;
  j["step_budget"] = step_budget;
  if (halt_threshold) j["halt_threshold"] = *halt_threshold;
  j["learner"] = learner_kind_to_string(learner);
  j["alpha"] = alpha;
  j["space_seed"] = space_seed;
  j["secret_seed"] = secret_seed;
  j["noise_seed"] = noise_seed;
  j["trial_seed"] = trial_seed;
  j["train_seed"] = train_seed;
  j["strategy"] = query_strategy_to_string(strategy);
  j["checkpoints"] = checkpoints;
  j["trials"] = trials;
  j["horizon"] = horizon;
  j["score_mode"] = score_mode;
  // `threads` is deliberately excluded: it cannot change any output byte.
  return j.dump();
}

std::string GameConfig::hash() const { return hex64(fnv1a64(canonical_json())); }

GameConfig GameConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  GameConfig config;
  if (j.contains("csv_path")) config.csv_path = j["csv_path"].get<std::string>();
  if (j.contains("synthetic")) {
    SyntheticSpec s;
    s.n = j["synthetic"].at("n").get<int>();
    s.num_classes = j["synthetic"].at("num_classes").get<int>();
    s.feature_dim = j["synthetic"].at("feature_dim").get<int>();
    s.separation = j["synthetic"].at("separation").get<double>();
    s.seed = j["synthetic"].at("seed").get<std::uint64_t>();
    config.synthetic = s;
  }
  config.m = j.at("m").get<int>();
  config.step_budget = j.at("step_budget").get<double>();
  if (j.contains("halt_threshold")) {
    config.halt_threshold = j["halt_threshold"].get<double>();
  }
  config.learner = learner_kind_from_string(j.at("learner").get<std::string>());
  config.alpha = j.at("alpha").get<double>();
  config.space_seed = j.at("space_seed").get<std::uint64_t>();
  config.secret_seed = j.at("secret_seed").get<std::uint64_t>();
  config.noise_seed = j.at("noise_seed").get<std::uint64_t>();
  config.trial_seed = j.at("trial_seed").get<std::uint64_t>();
  config.train_seed = j.at("train_seed").get<std::uint64_t>();
  config.strategy =
      query_strategy_from_string(j.at("strategy").get<std::string>());
  config.checkpoints = j.at("checkpoints").get<std::vector<std::int64_t>>();
  config.trials = j.at("trials").get<int>();
  config.horizon = j.at("horizon").get<std::int64_t>();
  config.score_mode = j.at("score_mode").get<bool>();
  return config;
}

GameSettings GameConfig::game_settings() const {
  GameSettings settings;
  settings.step_budget = step_budget;
  settings.halt_threshold = halt_threshold;
  settings.horizon = horizon;
  settings.trials = trials;
  settings.strategy = strategy;
  settings.checkpoints = checkpoints;
  settings.score_mode = score_mode;
  settings.secret_seed = secret_seed;
  settings.noise_seed = noise_seed;
  settings.trial_seed = trial_seed;
  settings.threads = threads;
  return settings;
}

Universe build_universe(const GameConfig& config) {
  if (config.csv_path && config.synthetic) {
    throw InvalidParameterError("config: give either csv_path or synthetic");
  }
  if (config.csv_path) return load_universe_csv(*config.csv_path);
  if (config.synthetic) {
    const SyntheticSpec& s = *config.synthetic;
    return make_synthetic_universe(s.n, s.num_classes, s.feature_dim,
                                   s.separation, s.seed);
  }
  throw InvalidParameterError("config: no dataset source");
}

std::vector<Eigen::VectorXd> load_query_pool_csv(const std::string& path,
                                                 int feature_dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pool csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("pool csv missing header");
  std::vector<Eigen::VectorXd> queries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (static_cast<int>(values.size()) == feature_dim + 1) {
      values.pop_back();  // labeled export; ignore the label column
    }
    if (static_cast<int>(values.size()) != feature_dim) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(feature_dim) +
                      " feature columns");
    }
    queries.push_back(Eigen::Map<Eigen::VectorXd>(
        values.data(), static_cast<long>(values.size())));
  }
  return queries;
}

int cmd_guarantee_table(const std::vector<double>& step_budgets,
                        const std::vector<std::int64_t>& horizons,
                        const std::vector<double>& dp_epsilons, double dp_delta,
                        const std::string& out_path) {
  const GuaranteeTable table =
      build_guarantee_table(step_budgets, horizons, dp_epsilons, dp_delta);
  if (out_path.empty() || out_path == "-") {
    std::cout << table.to_csv();
  } else {
    write_file(out_path, table.to_csv());
  }
  return kExitOk;
}

int cmd_build_pool(const GameConfig& config, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const Universe universe = build_universe(config);
  const SecretSpace space =
      construct_secret_space(universe, config.m, config.space_seed);
  const ModelPool pool =
      train_pool(universe, space, config.learner, config.train_seed);
  space.save(out_dir + "/secret_space.json");
  pool.save(out_dir + "/model_pool.json");
  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::parse(config.canonical_json());
  manifest["config_hash"] = config.hash();
  manifest["universe_hash"] = universe.content_hash();
  write_file(out_dir + "/manifest.json", manifest.dump(2));
  return kExitOk;
}

int cmd_run_game(const GameConfig& config, const std::string& out_dir,
                 TranscriptLogging logging) {
  std::filesystem::create_directories(out_dir);
  const Universe universe = build_universe(config);
  auto space = std::make_shared<const SecretSpace>(
      construct_secret_space(universe, config.m, config.space_seed));
  const ModelPool pool =
      train_pool(universe, *space, config.learner, config.train_seed);

  GameSettings settings = config.game_settings();
  const std::string log_dir = log_directory(out_dir);
  std::filesystem::create_directories(log_dir);
  if (logging != TranscriptLogging::kNone) {
    settings.on_trial_done = [&](int trial, const Curator& curator) {
      if (logging == TranscriptLogging::kFirstTrial && trial != 0) return;
      write_file(log_dir + "/trial_" + std::to_string(trial) + ".jsonl",
                 curator.transcript_jsonl());
    };
  }

  const GameReport report = run_game(universe, space, pool, settings);
  write_file(out_dir + "/report.csv", report.to_csv());
  write_file(out_dir + "/report_summary.csv", report.summary_csv());

  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::parse(config.canonical_json());
  manifest["config_hash"] = config.hash();
  manifest["halted_trials"] = report.halted_trials;
  write_file(out_dir + "/manifest.json", manifest.dump(2));

  return report.halted_trials.empty() ? kExitOk : kExitBudgetExhausted;
}

int cmd_distill(const GameConfig& config, const std::string& pool_csv,
                const std::string& out_dir, bool train_student) {
  std::filesystem::create_directories(out_dir);
  const Universe universe = build_universe(config);
  auto space = std::make_shared<const SecretSpace>(
      construct_secret_space(universe, config.m, config.space_seed));
  const ModelPool pool =
      train_pool(universe, *space, config.learner, config.train_seed);
  const std::vector<Eigen::VectorXd> queries =
      load_query_pool_csv(pool_csv, universe.feature_dim());

  const int secret = sample_secret(*space, config.secret_seed);
  Curator curator(space, secret, config.noise_seed, config.halt_threshold);
  const DistillationSet set = label_and_filter(curator, pool, queries,
                                               config.alpha, config.step_budget);
  write_distillation_csv(set, out_dir + "/distilled.csv");

  nlohmann::json manifest = nlohmann::json::parse(distillation_manifest(set));
  manifest["config"] = nlohmann::json::parse(config.canonical_json());
  manifest["config_hash"] = config.hash();
  if (set.retained.empty()) {
    std::cerr << "warning: confidence filter retained no samples\n";
  }

  if (train_student && !set.retained.empty()) {
    const Universe student_data =
        universe_from_examples(set.retained, universe.num_classes());
    const Model student = train_full(student_data, config.learner,
                                     derive_seed(config.train_seed, 0x57d));
    manifest["student_training_rows"] =
        static_cast<std::int64_t>(set.retained.size());
    manifest["student_self_accuracy"] = accuracy(student, student_data);
  }
  write_file(out_dir + "/manifest.json", manifest.dump(2));
  return set.truncated ? kExitBudgetExhausted : kExitOk;
}

}  // namespace pacpriv
