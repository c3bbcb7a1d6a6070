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

#ifndef PACPRIV_SERVICE_HPP_
#define PACPRIV_SERVICE_HPP_

#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>

#include "pacpriv/cli.hpp"
#include "pacpriv/curator.hpp"
#include "pacpriv/learner.hpp"

namespace pacpriv {

// Line-delimited JSON protocol over one curator. Requests:
//   {"op":"query","features":[...]}  -> {"label","response","step",
//                                        "cum_mi_bits","mia_bound_pct",
//                                        "dp_eps_equiv"}
//   {"op":"status"}                  -> accountant snapshot
//   {"op":"shutdown"}                -> {"ok":"shutdown"}
// Every line gets exactly one reply; malformed lines get {"error":...} and
// leave the state untouched; once the budget is exhausted queries are
// refused with {"error":"budget_exhausted",...}.
class ServiceSession {
 public:
  explicit ServiceSession(const GameConfig& config);

  // Thread-safe: concurrent callers serialize on an internal mutex, so
  // replies are produced in a single total order.
  std::string handle_line(const std::string& line);

  bool shutdown_requested() const { return shutdown_; }
  const Curator& curator() const { return *curator_; }

 private:
  std::string handle_parsed(const std::string& line);

  GameConfig config_;
  std::shared_ptr<const SecretSpace> space_;
  std::unique_ptr<ModelPool> pool_;
  std::unique_ptr<Curator> curator_;
  std::mutex mutex_;
  bool shutdown_ = false;
};

// Serves the protocol over stdin/stdout-style streams until shutdown or EOF.
int serve_stream(const GameConfig& config, std::istream& in, std::ostream& out);

// Serves the protocol on a local TCP port (one session shared by all
// connections, queries serialized). Returns when a client sends shutdown.
int serve_tcp(const GameConfig& config, int port);

}  // namespace pacpriv

#endif  // PACPRIV_SERVICE_HPP_
