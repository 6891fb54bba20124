// Copyright 2026 The bimflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bimflow::orchestrator {

enum class OrchestratorErrc { ProtocolError, SessionClosed, NotFound };
std::string_view to_string(OrchestratorErrc code);

class OrchestratorError : public std::runtime_error {
 public:
  OrchestratorError(OrchestratorErrc code, const std::string& message);
  OrchestratorErrc code() const noexcept { return code_; }

 private:
  OrchestratorErrc code_;
};

struct Event {
  std::uint64_t seq = 0;  // per session, from 1
  std::string type;
  std::string session_id;
  int turn = 0;
  nlohmann::json data;
};

void to_json(nlohmann::json& j, const Event& event);

/// Ordered per-session fan-out. Every subscriber sees every event published
/// after it subscribed, in publication order. Callbacks run on the
/// publishing thread and must not publish to the same stream.
class EventStream {
 public:
  using Callback = std::function<void(const Event&)>;

  explicit EventStream(std::string session_id) : session_id_(std::move(session_id)) {}

  /// Throws OrchestratorError(SessionClosed) after close().
  std::uint64_t subscribe(Callback callback);
  void unsubscribe(std::uint64_t id);
  Event publish(std::string type, int turn, nlohmann::json data = nlohmann::json::object());
  void close();
  bool closed() const;

  std::vector<Event> history() const;

 private:
  std::string session_id_;
  mutable std::mutex mutex_;
  std::mutex delivery_;
  std::vector<std::pair<std::uint64_t, Callback>> subscribers_;
  std::vector<Event> history_;
  std::uint64_t next_seq_ = 1;
  std::uint64_t next_subscriber_ = 1;
  bool closed_ = false;
};

}  // namespace bimflow::orchestrator
