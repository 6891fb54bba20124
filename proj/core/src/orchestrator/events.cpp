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

#include "bimflow/orchestrator/events.hpp"

#include <algorithm>

namespace bimflow::orchestrator {

std::string_view to_string(OrchestratorErrc code) {
  switch (code) {
    case OrchestratorErrc::ProtocolError: return "ProtocolError";
    case OrchestratorErrc::SessionClosed: return "SessionClosed";
    case OrchestratorErrc::NotFound: return "NotFound";
  }
  return "?";
}

OrchestratorError::OrchestratorError(OrchestratorErrc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void to_json(nlohmann::json& j, const Event& event) {
  j = nlohmann::json{{"seq", event.seq},
                     {"type", event.type},
                     {"session_id", event.session_id},
                     {"turn", event.turn},
                     {"data", event.data}};
}

std::uint64_t EventStream::subscribe(Callback callback) {
  std::lock_guard lock(mutex_);
  if (closed_) throw OrchestratorError(OrchestratorErrc::SessionClosed, "session " + session_id_ + " is closed");
  const auto id = next_subscriber_++;
  subscribers_.emplace_back(id, std::move(callback));
  return id;
}

void EventStream::unsubscribe(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  subscribers_.erase(std::remove_if(subscribers_.begin(), subscribers_.end(),
                                    [id](const auto& s) { return s.first == id; }),
                     subscribers_.end());
}

Event EventStream::publish(std::string type, int turn, nlohmann::json data) {
  // delivery_ keeps callbacks in publication order even with concurrent
  // publishers.
  std::lock_guard delivery(delivery_);
  Event event;
  std::vector<std::pair<std::uint64_t, Callback>> targets;
  {
    std::lock_guard lock(mutex_);
    event.seq = next_seq_++;
    event.type = std::move(type);
    event.session_id = session_id_;
    event.turn = turn;
    event.data = std::move(data);
    history_.push_back(event);
    targets = subscribers_;
  }
  for (const auto& [id, callback] : targets) callback(event);
  return event;
}

void EventStream::close() {
  std::lock_guard lock(mutex_);
  closed_ = true;
  subscribers_.clear();
}

bool EventStream::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

std::vector<Event> EventStream::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

}  // namespace bimflow::orchestrator
