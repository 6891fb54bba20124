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

#include "bimflow/llm/openai_backend.hpp"

#include <cstdlib>
#include <regex>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace bimflow::llm {

using nlohmann::json;

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw GatewayError(GatewayErrc::InvalidRequest, "malformed endpoint url '" + url + "'");
  }
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

[[noreturn]] void raise_transport(const httplib::Result& result, const std::string& what) {
  if (!result) {
    throw GatewayError(GatewayErrc::BackendUnreachable,
                       what + ": " + httplib::to_string(result.error()), true);
  }
  const int status = result->status;
  if (status == 429) {
    std::optional<std::chrono::milliseconds> retry_after;
    if (result->has_header("Retry-After")) {
      try {
        retry_after = std::chrono::milliseconds(
            static_cast<std::int64_t>(std::stod(result->get_header_value("Retry-After")) * 1000));
      } catch (const std::exception&) {
      }
    }
    throw GatewayError(GatewayErrc::RateLimited, what + ": HTTP 429", true, retry_after);
  }
  if (status >= 500) {
    throw GatewayError(GatewayErrc::BackendUnreachable,
                       what + ": HTTP " + std::to_string(status), true);
  }
  throw GatewayError(GatewayErrc::InvalidRequest,
                     what + ": HTTP " + std::to_string(status) + ": " + result->body.substr(0, 512));
}

httplib::Client make_client(const std::string& origin, std::chrono::seconds timeout) {
  httplib::Client client(origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

}  // namespace

OpenAIBackend::OpenAIBackend(OpenAIConfig config, std::shared_ptr<Clock> clock)
    : config_(std::move(config)), clock_(clock ? std::move(clock) : steady_clock()) {}

std::string OpenAIBackend::api_key() const {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw GatewayError(GatewayErrc::InvalidRequest,
                       "environment variable " + config_.api_key_env + " is not set");
  }
  return key;
}

std::string OpenAIBackend::chat_body(const ChatRequest& request) const {
  json messages = json::array();
  if (!request.system_instruction.empty()) {
    messages.push_back({{"role", "system"}, {"content", request.system_instruction}});
  }
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  json body{{"model", request.model.empty() ? config_.chat_model : request.model},
            {"messages", std::move(messages)},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
  if (request.response_hint == ResponseHint::JsonObject) {
    body["response_format"] = {{"type", "json_object"}};
  }
  return body.dump();
}

ChatResponse OpenAIBackend::complete(const ChatRequest& request) {
  validate_request(request);
  const auto endpoint = split_url(config_.chat_url);
  auto client = make_client(endpoint.origin, config_.timeout);
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key()}};
  const auto started = clock_->now_ms();
  auto result = client.Post(endpoint.path, headers, chat_body(request), "application/json");
  if (!result || result->status != 200) raise_transport(result, "chat completion");

  json doc = json::parse(result->body, nullptr, false);
  if (doc.is_discarded()) throw GatewayError(GatewayErrc::BadResponse, "response is not JSON");
  std::string content;
  try {
    const auto& c = doc.at("choices").at(0).at("message").at("content");
    if (c.is_string()) content = c.get<std::string>();
  } catch (const json::exception& e) {
    throw GatewayError(GatewayErrc::BadResponse, std::string("unexpected response shape: ") + e.what());
  }
  if (content.empty()) throw GatewayError(GatewayErrc::ResponseEmpty, "model returned no content");
  ChatResponse response;
  response.content = std::move(content);
  response.backend_id = id();
  response.latency_ms = clock_->now_ms() - started;
  return response;
}

Transcript OpenAIBackend::transcribe(std::span<const std::byte> audio, std::string_view media_type) {
  if (audio.empty()) throw GatewayError(GatewayErrc::UnsupportedMedia, "audio blob is empty");
  if (!is_supported_audio_type(media_type)) {
    throw GatewayError(GatewayErrc::UnsupportedMedia,
                       "unsupported media type '" + std::string(media_type) + "'");
  }
  const auto endpoint = split_url(config_.transcription_url);
  auto client = make_client(endpoint.origin, config_.timeout);
  const httplib::Headers headers{{"Authorization", "Bearer " + api_key()}};
  httplib::MultipartFormDataItems items{
      {"file", std::string(reinterpret_cast<const char*>(audio.data()), audio.size()), "audio",
       std::string(media_type)},
      {"model", config_.transcription_model, "", ""},
      {"response_format", "verbose_json", "", ""},
  };
  auto result = client.Post(endpoint.path, headers, items);
  if (!result || result->status != 200) raise_transport(result, "transcription");

  json doc = json::parse(result->body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw GatewayError(GatewayErrc::BadResponse, "transcription response is not a JSON object");
  }
  Transcript t;
  t.text = doc.value("text", std::string{});
  t.language_tag = doc.value("language", std::string{});
  t.duration_s = doc.value("duration", 0.0);
  if (t.text.empty()) throw GatewayError(GatewayErrc::ResponseEmpty, "no speech recognised");
  return t;
}

std::unique_ptr<ChatBackend> OpenAIBackend::fork(std::uint64_t /*seed*/,
                                                 std::shared_ptr<Clock> clock) const {
  return std::make_unique<OpenAIBackend>(config_, clock ? std::move(clock) : clock_);
}

}  // namespace bimflow::llm
