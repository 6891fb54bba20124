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

#include "bimflow/llm/types.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "bimflow/llm/backend.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::llm {

std::string_view to_string(GatewayErrc code) {
  switch (code) {
    case GatewayErrc::BackendUnreachable: return "BackendUnreachable";
    case GatewayErrc::RateLimited: return "RateLimited";
    case GatewayErrc::ResponseEmpty: return "ResponseEmpty";
    case GatewayErrc::UnsupportedMedia: return "UnsupportedMedia";
    case GatewayErrc::InvalidScript: return "InvalidScript";
    case GatewayErrc::InvalidRequest: return "InvalidRequest";
    case GatewayErrc::BadResponse: return "BadResponse";
  }
  return "?";
}

GatewayError::GatewayError(GatewayErrc code, std::string message, bool transient,
                           std::optional<std::chrono::milliseconds> retry_after)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      transient_(transient),
      retry_after_(retry_after) {}

std::string_view to_string(Role role) { return role == Role::User ? "user" : "assistant"; }

void validate_request(const ChatRequest& request) {
  auto fail = [](const std::string& why) {
    throw GatewayError(GatewayErrc::InvalidRequest, why);
  };
  if (request.messages.empty()) fail("messages are empty");
  for (std::size_t i = 0; i < request.messages.size(); ++i) {
    const Role expected = (i % 2 == 0) ? Role::User : Role::Assistant;
    if (request.messages[i].role != expected) {
      fail("message " + std::to_string(i) + " breaks user/assistant alternation");
    }
  }
  if (!std::isfinite(request.temperature) || request.temperature < 0.0) {
    fail("temperature must be >= 0");
  }
  if (request.max_tokens <= 0) fail("max_tokens must be positive");
}

void to_json(nlohmann::json& j, const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  j = nlohmann::json{
      {"system_instruction", request.system_instruction},
      {"messages", std::move(messages)},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
      {"response_hint",
       request.response_hint == ResponseHint::JsonObject ? "JsonObject" : "FreeText"},
      {"model", request.model},
      {"tags", request.tags},
  };
}

void to_json(nlohmann::json& j, const ChatResponse& response) {
  j = nlohmann::json{{"content", response.content},
                     {"backend_id", response.backend_id},
                     {"latency_ms", response.latency_ms},
                     {"attempt", response.attempt}};
}

void to_json(nlohmann::json& j, const Transcript& t) {
  j = nlohmann::json{{"text", t.text}, {"language_tag", t.language_tag}, {"duration", t.duration_s}};
}

std::string_view last_user_content(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == Role::User) return it->content;
  }
  return {};
}

bool is_supported_audio_type(std::string_view media_type) {
  static const char* kTypes[] = {"audio/wav",  "audio/x-wav", "audio/wave", "audio/mpeg",
                                 "audio/mp3",  "audio/mp4",   "audio/m4a",  "audio/x-m4a",
                                 "audio/webm", "audio/ogg",   "audio/flac", "audio/x-flac"};
  auto base = media_type.substr(0, media_type.find(';'));
  base = util::trim(base);
  for (const auto* t : kTypes) {
    if (util::iequals(base, t)) return true;
  }
  return false;
}

}  // namespace bimflow::llm
