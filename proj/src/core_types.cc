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

#include "pacpriv/core_types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
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

Universe::Universe(std::vector<Record> records, int num_classes)
    : records_(std::move(records)), num_classes_(num_classes) {
  if (records_.empty()) throw DataError("universe: no records");
  if (num_classes_ < 2) {
    throw InvalidParameterError("universe: need at least 2 classes");
  }
  feature_dim_ = static_cast<int>(records_.front().features.size());
  if (feature_dim_ < 1) throw DataError("universe: empty feature vectors");
  for (const Record& r : records_) {
    if (static_cast<int>(r.features.size()) != feature_dim_) {
      throw DataError("universe: inconsistent feature dimensions");
    }
    if (!r.features.allFinite()) {
      throw DataError("universe: non-finite feature value");
    }
    if (r.label < 0 || r.label >= num_classes_) {
      throw DataError("universe: label out of range");
    }
  }
}

std::uint64_t Universe::content_hash() const {
  std::string bytes;
  bytes.reserve(records_.size() * (feature_dim_ + 1) * sizeof(double));
  auto push = [&bytes](double v) {
    char raw[sizeof(double)];
    std::memcpy(raw, &v, sizeof(double));
    bytes.append(raw, sizeof(double));
  };
  for (const Record& r : records_) {
    for (int k = 0; k < feature_dim_; ++k) push(r.features(k));
    push(static_cast<double>(r.label));
  }
  return fnv1a64(bytes);
}

Universe load_universe_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv missing header: " + path);

  std::vector<Record> records;
  int max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": non-numeric cell '" + cell + "'");
      }
    }
    if (values.size() < 2) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": need at least one feature and a label");
    }
    const double raw_label = values.back();
    values.pop_back();
    if (raw_label != std::floor(raw_label) || raw_label < 0) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": label must be a nonnegative integer");
    }
    Record r;
    r.features = Eigen::Map<Eigen::VectorXd>(values.data(),
                                             static_cast<long>(values.size()));
    r.label = static_cast<int>(raw_label);
    max_label = std::max(max_label, r.label);
    records.push_back(std::move(r));
  }
  return Universe(std::move(records), std::max(2, max_label + 1));
}

void save_universe_csv(const Universe& universe, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write csv: " + path);
  for (int k = 0; k < universe.feature_dim(); ++k) out << "f" << k << ",";
  out << "label\n";
  for (const Record& r : universe.records()) {
    for (int k = 0; k < universe.feature_dim(); ++k) {
      out << format_double(r.features(k)) << ",";
    }
    out << r.label << "\n";
  }
}

std::vector<int> SecretSpace::records_in_subset(int subset) const {
  std::vector<int> out;
  for (int i = 0; i < n_; ++i) {
    if (contains(i, subset)) out.push_back(i);
  }
  return out;
}

int SecretSpace::row_count(int record) const {
  int count = 0;
  for (int j = 0; j < m_; ++j) count += contains(record, j) ? 1 : 0;
  return count;
}

SecretSpace construct_secret_space(const Universe& universe, int m,
                                   std::uint64_t seed) {
  if (m < 2 || m % 2 != 0) {
    throw InvalidParameterError(
        "construct_secret_space: m must be an even integer >= 2");
  }
  SecretSpace space;
  space.n_ = universe.size();
  space.m_ = m;
  space.seed_ = seed;
  space.membership_.assign(static_cast<std::size_t>(space.n_) * m, 0);

  std::mt19937_64 gen(seed);
  std::vector<int> indices(m);
  for (int i = 0; i < space.n_; ++i) {
    std::iota(indices.begin(), indices.end(), 0);
    // Partial Fisher-Yates: the first m/2 entries are the assigned subsets.
    for (int k = 0; k < m / 2; ++k) {
      const int j =
          k + static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(m - k)));
      std::swap(indices[k], indices[j]);
      space.membership_[static_cast<std::size_t>(i) * m + indices[k]] = 1;
    }
  }
  return space;
}

int sample_secret(const SecretSpace& space, std::uint64_t seed) {
  std::mt19937_64 gen(derive_seed(seed, 0x5ec7e7));
  return static_cast<int>(
      uniform_below(gen, static_cast<std::uint64_t>(space.num_subsets())));
}

std::string SecretSpace::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["m"] = m_;
  j["seed"] = seed_;
  // Row bitmaps as hex strings, 4 bits per character, subset index ascending.
  std::vector<std::string> rows;
  rows.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    std::string hex;
    for (int base = 0; base < m_; base += 4) {
      int nibble = 0;
      for (int bit = 0; bit < 4 && base + bit < m_; ++bit) {
        if (contains(i, base + bit)) nibble |= 1 << bit;
      }
      hex.push_back("0123456789abcdef"[nibble]);
    }
    rows.push_back(std::move(hex));
  }
  j["membership"] = rows;
  return j.dump();
}

SecretSpace SecretSpace::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SecretSpace space;
  space.n_ = j.at("n").get<int>();
  space.m_ = j.at("m").get<int>();
  space.seed_ = j.at("seed").get<std::uint64_t>();
  if (space.m_ < 2 || space.m_ % 2 != 0 || space.n_ < 1) {
    throw DataError("secret space artifact: invalid dimensions");
  }
  space.membership_.assign(static_cast<std::size_t>(space.n_) * space.m_, 0);
  const auto rows = j.at("membership").get<std::vector<std::string>>();
  if (static_cast<int>(rows.size()) != space.n_) {
    throw DataError("secret space artifact: row count mismatch");
  }
  for (int i = 0; i < space.n_; ++i) {
    const std::string& hex = rows[i];
    if (static_cast<int>(hex.size()) != (space.m_ + 3) / 4) {
      throw DataError("secret space artifact: bitmap length mismatch");
    }
    for (int j_idx = 0; j_idx < space.m_; ++j_idx) {
      const char ch = hex[j_idx / 4];
      const int nibble =
          ch >= 'a' ? ch - 'a' + 10 : (ch >= 'A' ? ch - 'A' + 10 : ch - '0');
      if ((nibble >> (j_idx % 4)) & 1) {
        space.membership_[static_cast<std::size_t>(i) * space.m_ + j_idx] = 1;
      }
    }
  }
  for (int i = 0; i < space.n_; ++i) {
    if (space.row_count(i) != space.m_ / 2) {
      throw DataError("secret space artifact: row regularity violated");
    }
  }
  return space;
}

void SecretSpace::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << to_json();
}

SecretSpace SecretSpace::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

BeliefState BeliefState::uniform(int m) {
  if (m < 2) throw InvalidParameterError("belief: need m >= 2");
  BeliefState b;
  b.log_weights_.assign(m, -std::log(static_cast<double>(m)));
  return b;
}

BeliefState BeliefState::from_log_weights(std::vector<double> log_weights,
                                          int step) {
  if (log_weights.size() < 2) {
    throw InvalidParameterError("belief: need m >= 2");
  }
  BeliefState b;
  b.log_weights_ = std::move(log_weights);
  b.step_ = step;
  const double lse = log_sum_exp(b.log_weights_);
  if (!std::isfinite(lse)) {
    throw InvalidParameterError("belief: all hypotheses have zero mass");
  }
  for (double& w : b.log_weights_) w -= lse;
  return b;
}

double BeliefState::probability(int j) const {
  return std::exp(log_weights_.at(j));
}

std::vector<double> BeliefState::probabilities() const {
  std::vector<double> p(log_weights_.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::exp(log_weights_[j]);
  return p;
}

void BeliefState::update(std::span<const double> log_likelihoods) {
  if (log_likelihoods.size() != log_weights_.size()) {
    throw DataError("belief update: likelihood length mismatch");
  }
  std::vector<double> updated(log_weights_.size());
  for (std::size_t j = 0; j < updated.size(); ++j) {
    // -inf + finite stays -inf: an excluded hypothesis never revives.
    updated[j] = log_weights_[j] + log_likelihoods[j];
  }
  const double lse = log_sum_exp(updated);
  if (!std::isfinite(lse)) {
    throw InvariantViolationError(
        "belief update: posterior has no surviving hypothesis");
  }
  for (double& w : updated) w -= lse;
  log_weights_ = std::move(updated);
  ++step_;
}

double BeliefState::normalization_error() const {
  return std::abs(log_sum_exp(log_weights_));
}

BudgetAccountant::BudgetAccountant(std::optional<double> halt_threshold)
    : halt_threshold_(halt_threshold) {
  if (halt_threshold_ && *halt_threshold_ <= 0.0) {
    throw InvalidParameterError("accountant: halt threshold must be positive");
  }
}

void BudgetAccountant::accumulate(double b_t) {
  if (!(b_t > 0.0)) {
    throw InvalidParameterError("accountant: step budget must be positive");
  }
  total_.add(b_t);
  ++steps_;
  if (halt_threshold_ && total_.value() > *halt_threshold_) {
    exhausted_ = true;
  }
}

}  // namespace pacpriv
