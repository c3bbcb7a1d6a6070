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

#include "pacpriv/adversary.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "pacpriv/accounting.hpp"
#include "pacpriv/errors.hpp"

namespace pacpriv {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

Adversary::Adversary(std::shared_ptr<const SecretSpace> space)
    : space_(std::move(space)),
      belief_(BeliefState::uniform(space_->num_subsets())) {}

void Adversary::observe(const MechanismMatrix& mech, const NoiseSpec& spec,
                        const Eigen::VectorXd& response) {
  belief_.update(log_likelihoods(spec, mech, response));
}

double Adversary::membership_probability(int record) const {
  double p = 0.0;
  for (int j = 0; j < space_->num_subsets(); ++j) {
    if (space_->contains(record, j)) p += belief_.probability(j);
  }
  return p;
}

int Adversary::decide_membership(int record) const {
  return membership_probability(record) > 0.5 ? 1 : 0;
}

QueryStrategy query_strategy_from_string(const std::string& name) {
  if (name == "member_replay") return QueryStrategy::kMemberReplay;
  if (name == "random_inputs") return QueryStrategy::kRandomInputs;
  throw InvalidParameterError("unknown query strategy: " + name);
}

std::string query_strategy_to_string(QueryStrategy strategy) {
  return strategy == QueryStrategy::kMemberReplay ? "member_replay"
                                                  : "random_inputs";
}

std::vector<std::int64_t> default_checkpoints(std::int64_t horizon) {
  std::vector<std::int64_t> points;
  for (std::int64_t base = 1; base <= horizon; base *= 10) {
    for (std::int64_t mult : {1, 2, 5}) {
      const std::int64_t t = base * mult;
      if (t <= horizon) points.push_back(t);
    }
  }
  if (points.empty() || points.back() != horizon) points.push_back(horizon);
  return points;
}

namespace {

// Query stream for one trial. Member replay walks a seeded permutation of
// the universe (re-permuting when it wraps); random inputs draw uniformly
// from the per-dimension bounding box of the universe features.
class QueryStream {
 public:
  QueryStream(const Universe& universe, QueryStrategy strategy,
              std::uint64_t seed)
      : universe_(universe),
        strategy_(strategy),
        gen_(seed),
        sampler_(derive_seed(seed, 0x71c0)) {}

  Eigen::VectorXd next() {
    if (strategy_ == QueryStrategy::kMemberReplay) {
      if (cursor_ >= order_.size()) reshuffle();
      return universe_.record(order_[cursor_++]).features;
    }
    if (lo_.size() == 0) compute_box();
    Eigen::VectorXd q(universe_.feature_dim());
    for (int k = 0; k < q.size(); ++k) {
      q(k) = lo_(k) + (hi_(k) - lo_(k)) * sampler_.next_uniform();
    }
    return q;
  }

 private:
  void reshuffle() {
    order_.resize(universe_.size());
    std::iota(order_.begin(), order_.end(), 0);
    for (std::size_t k = order_.size(); k > 1; --k) {
      std::swap(order_[k - 1], order_[uniform_below(gen_, k)]);
    }
    cursor_ = 0;
  }

  void compute_box() {
    lo_ = universe_.record(0).features;
    hi_ = universe_.record(0).features;
    for (const Record& r : universe_.records()) {
      lo_ = lo_.cwiseMin(r.features);
      hi_ = hi_.cwiseMax(r.features);
    }
  }

  const Universe& universe_;
  QueryStrategy strategy_;
  std::mt19937_64 gen_;
  NormalSampler sampler_;
  std::vector<int> order_;
  std::size_t cursor_ = 0;
  Eigen::VectorXd lo_, hi_;
};

struct TrialOutcome {
  std::vector<GameReport::Row> rows;
  bool halted = false;
};

}  // namespace

GameReport run_game(const Universe& universe,
                    std::shared_ptr<const SecretSpace> space,
                    const ModelPool& pool, const GameSettings& settings) {
  if (settings.horizon < 0 || settings.trials < 1) {
    throw InvalidParameterError("run_game: bad horizon or trial count");
  }
  if (!(settings.step_budget > 0.0)) {
    throw InvalidParameterError("run_game: step budget must be positive");
  }
  std::vector<std::int64_t> checkpoints = settings.checkpoints.empty()
                                              ? default_checkpoints(settings.horizon)
                                              : settings.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  if (!checkpoints.empty() && checkpoints.front() < 0) {
    throw InvalidParameterError("run_game: negative checkpoint");
  }

  const int n = universe.size();
  auto run_trial = [&](int trial) {
    TrialOutcome outcome;
    const int secret =
        sample_secret(*space, derive_seed(settings.secret_seed, trial));
    Curator curator(space, secret, derive_seed(settings.noise_seed, trial),
                    settings.halt_threshold);
    Adversary adversary(space);
    QueryStream stream(universe, settings.strategy,
                       derive_seed(settings.trial_seed, trial));

    auto record_checkpoint = [&](std::int64_t checkpoint) {
      int correct = 0;
      for (int i = 0; i < n; ++i) {
        const int truth = space->contains(i, secret) ? 1 : 0;
        if (adversary.decide_membership(i) == truth) ++correct;
      }
      GameReport::Row row;
      row.trial = trial;
      row.checkpoint = checkpoint;
      row.empirical_acc = static_cast<double>(correct) / n;
      row.cumulative_mi = curator.accountant().cumulative();
      row.theoretical_bound = mia_bound_from_mi(row.cumulative_mi, 0.5);
      outcome.rows.push_back(row);
    };

    std::size_t next_checkpoint = 0;
    while (next_checkpoint < checkpoints.size() &&
           checkpoints[next_checkpoint] == 0) {
      record_checkpoint(0);
      ++next_checkpoint;
    }
    for (std::int64_t step = 1; step <= settings.horizon; ++step) {
      auto mech = std::make_shared<MechanismMatrix>(
          predict_matrix(pool, stream.next(), settings.score_mode));
      mech->query_id = "t" + std::to_string(trial) + ".q" + std::to_string(step);
      try {
        const QueryResult result =
            curator.answer_query(mech, settings.step_budget);
        adversary.observe(*mech, result.spec, result.response);
      } catch (const BudgetExhaustedError&) {
        outcome.halted = true;
        break;
      }
      if (next_checkpoint < checkpoints.size() &&
          checkpoints[next_checkpoint] == step) {
        record_checkpoint(step);
        ++next_checkpoint;
      }
    }
    if (settings.on_trial_done) settings.on_trial_done(trial, curator);
    return outcome;
  };

  std::vector<TrialOutcome> outcomes(settings.trials);
  int threads = settings.threads > 0
                    ? settings.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, settings.trials));
  if (threads == 1) {
    for (int t = 0; t < settings.trials; ++t) outcomes[t] = run_trial(t);
  } else {
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (int t = next.fetch_add(1); t < settings.trials;
             t = next.fetch_add(1)) {
          outcomes[t] = run_trial(t);
        }
      });
    }
    for (std::thread& w : workers) w.join();
  }

  GameReport report;
  for (int t = 0; t < settings.trials; ++t) {
    if (outcomes[t].halted) report.halted_trials.push_back(t);
    report.rows.insert(report.rows.end(), outcomes[t].rows.begin(),
                       outcomes[t].rows.end());
  }

  for (std::int64_t checkpoint : checkpoints) {
    std::vector<double> accs;
    double bound = 0.0;
    for (const GameReport::Row& row : report.rows) {
      if (row.checkpoint == checkpoint) {
        accs.push_back(row.empirical_acc);
        bound = row.theoretical_bound;
      }
    }
    if (accs.empty()) continue;
    GameReport::Summary summary;
    summary.checkpoint = checkpoint;
    summary.trials = static_cast<int>(accs.size());
    summary.mean_acc =
        std::accumulate(accs.begin(), accs.end(), 0.0) / accs.size();
    if (accs.size() > 1) {
      double var = 0.0;
      for (double a : accs) var += (a - summary.mean_acc) * (a - summary.mean_acc);
      var /= static_cast<double>(accs.size() - 1);
      summary.std_error = std::sqrt(var / static_cast<double>(accs.size()));
    }
    summary.theoretical_bound = bound;
    report.summaries.push_back(summary);

    if (settings.verify_bound && accs.size() > 1 &&
        summary.mean_acc >
            summary.theoretical_bound + 3.0 * summary.std_error) {
      throw InvariantViolationError(
          "membership accuracy " + format_double(summary.mean_acc) +
          " exceeds guarantee " + format_double(summary.theoretical_bound) +
          " + 3se at checkpoint " + std::to_string(checkpoint));
    }
  }
  return report;
}

std::string GameReport::to_csv() const {
  std::ostringstream out;
  out << "trial,checkpoint_T,empirical_acc,theoretical_bound,cum_B_bits\n";
  for (const Row& row : rows) {
    out << row.trial << "," << row.checkpoint << ","
        << format_double(row.empirical_acc) << ","
        << format_double(row.theoretical_bound) << ","
        << format_double(row.cumulative_mi) << "\n";
  }
  return out.str();
}

std::string GameReport::summary_csv() const {
  std::ostringstream out;
  out << "checkpoint_T,trials,mean_acc,std_error,theoretical_bound\n";
  for (const Summary& s : summaries) {
    out << s.checkpoint << "," << s.trials << "," << format_double(s.mean_acc)
        << "," << format_double(s.std_error) << ","
        << format_double(s.theoretical_bound) << "\n";
  }
  return out.str();
}

}  // namespace pacpriv
