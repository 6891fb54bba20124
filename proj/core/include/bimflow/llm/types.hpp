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

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bimflow::llm {

enum class Role { User, Assistant };

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

enum class ResponseHint { FreeText, JsonObject };

struct ChatRequest {
  std::string system_instruction;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 1024;
  ResponseHint response_hint = ResponseHint::FreeText;
  // Model override; empty selects the backend default.
  std::string model;
  // Routing metadata (pipeline step, slot values). Visible to the mock
  // backend's matchers, never sent to a live endpoint.
  std::map<std::string, std::string> tags;

  bool operator==(const ChatRequest&) const = default;
};

struct ChatResponse {
  std::string content;
  std::string backend_id;
  std::int64_t latency_ms = 0;
  int attempt = 1;
};

struct Transcript {
  std::string text;
  std::string language_tag;
  double duration_s = 0.0;
};

enum class GatewayErrc {
  BackendUnreachable,
  RateLimited,
  ResponseEmpty,
  UnsupportedMedia,
  InvalidScript,
  InvalidRequest,
  BadResponse,
};

std::string_view to_string(GatewayErrc code);

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrc code, std::string message, bool transient = false,
               std::optional<std::chrono::milliseconds> retry_after = std::nullopt);

  GatewayErrc code() const noexcept { return code_; }
  /// Transport-level failure worth retrying.
  bool transient() const noexcept { return transient_; }
  std::optional<std::chrono::milliseconds> retry_after() const noexcept { return retry_after_; }

 private:
  GatewayErrc code_;
  bool transient_;
  std::optional<std::chrono::milliseconds> retry_after_;
};

/// Throws GatewayError(InvalidRequest) when messages are empty, do not
/// alternate starting with a user turn, or numeric fields are out of range.
void validate_request(const ChatRequest& request);

std::string_view to_string(Role role);

void to_json(nlohmann::json& j, const ChatRequest& request);
void to_json(nlohmann::json& j, const ChatResponse& response);
void to_json(nlohmann::json& j, const Transcript& transcript);

/// Text of the last user message, or empty.
std::string_view last_user_content(const ChatRequest& request);

}  // namespace bimflow::llm
