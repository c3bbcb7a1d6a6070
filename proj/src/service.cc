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

#include "pacpriv/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstring>
#include <iostream>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pacpriv/accounting.hpp"
#include "pacpriv/errors.hpp"

namespace pacpriv {

namespace {

nlohmann::json error_reply(const std::string& code, const std::string& detail) {
  nlohmann::json j;
  j["error"] = code;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

}  // namespace

ServiceSession::ServiceSession(const GameConfig& config) : config_(config) {
  const Universe universe = build_universe(config_);
  space_ = std::make_shared<const SecretSpace>(
      construct_secret_space(universe, config_.m, config_.space_seed));
  pool_ = std::make_unique<ModelPool>(
      train_pool(universe, *space_, config_.learner, config_.train_seed));
  const int secret = sample_secret(*space_, config_.secret_seed);
  curator_ = std::make_unique<Curator>(space_, secret, config_.noise_seed,
                                       config_.halt_threshold);
}

std::string ServiceSession::handle_line(const std::string& line) {
  std::lock_guard<std::mutex> lock(mutex_);
  return handle_parsed(line);
}

std::string ServiceSession::handle_parsed(const std::string& line) {
  nlohmann::json request = nlohmann::json::parse(line, nullptr, false);
  if (request.is_discarded() || !request.is_object() ||
      !request.contains("op") || !request["op"].is_string()) {
    return error_reply("malformed_request", "expected {\"op\": ...}").dump();
  }
  const std::string op = request["op"].get<std::string>();

  const auto snapshot = [this](nlohmann::json& j) {
    const double cum = curator_->accountant().cumulative();
    const double bound = mia_bound_from_mi(cum, 0.5);
    j["cum_mi_bits"] = cum;
    j["mia_bound_pct"] = 100.0 * bound;
    j["dp_eps_equiv"] = dp_epsilon_or_zero(bound, 1e-5);
  };

  if (op == "status") {
    nlohmann::json reply;
    reply["step"] = curator_->accountant().steps();
    snapshot(reply);
    reply["exhausted"] = curator_->accountant().exhausted();
    if (config_.halt_threshold) {
      reply["halt_threshold_bits"] = *config_.halt_threshold;
    }
    return reply.dump();
  }
  if (op == "shutdown") {
    shutdown_ = true;
    nlohmann::json reply;
    reply["ok"] = "shutdown";
    return reply.dump();
  }
  if (op != "query") {
    return error_reply("unknown_op", op).dump();
  }

  if (!request.contains("features") || !request["features"].is_array()) {
    return error_reply("malformed_request", "query needs \"features\"").dump();
  }
  Eigen::VectorXd query(request["features"].size());
  for (std::size_t i = 0; i < request["features"].size(); ++i) {
    if (!request["features"][i].is_number()) {
      return error_reply("malformed_request", "features must be numbers")
          .dump();
    }
    query(static_cast<long>(i)) = request["features"][i].get<double>();
  }
  if (query.size() != pool_->feature_dim()) {
    return error_reply("bad_features",
                       "expected " + std::to_string(pool_->feature_dim()) +
                           " features")
        .dump();
  }

  auto mech = std::make_shared<MechanismMatrix>(
      predict_matrix(*pool_, query, config_.score_mode));
  mech->query_id = "q" + std::to_string(curator_->accountant().steps() + 1);
  try {
    const QueryResult result =
        curator_->answer_query(mech, config_.step_budget);
    nlohmann::json reply;
    reply["label"] = result.label;
    reply["response"] = std::vector<double>(
        result.response.data(), result.response.data() + result.response.size());
    reply["step"] = curator_->accountant().steps();
    snapshot(reply);
    return reply.dump();
  } catch (const BudgetExhaustedError& e) {
    nlohmann::json reply = error_reply("budget_exhausted", "");
    reply["cum_mi_bits"] = e.cumulative_mi;
    reply["mia_bound_pct"] = 100.0 * e.mia_bound;
    return reply.dump();
  }
}

int serve_stream(const GameConfig& config, std::istream& in,
                 std::ostream& out) {
  ServiceSession session(config);
  std::string line;
  while (std::getline(in, line)) {
    out << session.handle_line(line) << "\n" << std::flush;
    if (session.shutdown_requested()) break;
  }
  return kExitOk;
}

namespace {

void serve_connection(ServiceSession& session, int fd,
                      std::atomic<bool>& stop) {
  std::string buffer;
  char chunk[4096];
  while (!stop.load()) {
    const ssize_t got = ::recv(fd, chunk, sizeof(chunk), 0);
    if (got <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(got));
    std::size_t pos;
    while ((pos = buffer.find('\n')) != std::string::npos) {
      const std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      const std::string reply = session.handle_line(line) + "\n";
      if (::send(fd, reply.data(), reply.size(), 0) < 0) break;
      if (session.shutdown_requested()) {
        stop.store(true);
        break;
      }
    }
  }
  ::close(fd);
}

}  // namespace

int serve_tcp(const GameConfig& config, int port) {
  ServiceSession session(config);

  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) {
    std::cerr << "serve: cannot create socket\n";
    return 1;
  }
  const int reuse = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &reuse, sizeof(reuse));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listener, 16) < 0) {
    std::cerr << "serve: cannot bind 127.0.0.1:" << port << "\n";
    ::close(listener);
    return 1;
  }
  std::cerr << "serving on 127.0.0.1:" << port << "\n";

  // Accept with a timeout so the shutdown flag is noticed promptly.
  timeval tv{};
  tv.tv_usec = 100 * 1000;
  ::setsockopt(listener, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));

  std::atomic<bool> stop{false};
  std::vector<std::thread> workers;
  while (!stop.load()) {
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;  // timeout or transient error
    workers.emplace_back(
        [&session, fd, &stop] { serve_connection(session, fd, stop); });
  }
  for (std::thread& w : workers) w.join();
  ::close(listener);
  return kExitOk;
}

}  // namespace pacpriv
