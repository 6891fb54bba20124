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
#include <string>

#include "bimflow/llm/backend.hpp"

namespace bimflow::llm {

struct OpenAIConfig {
  std::string chat_url = "https://api.openai.com/v1/chat/completions";
  std::string transcription_url = "https://api.openai.com/v1/audio/transcriptions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string chat_model = "gpt-4-0613";
  std::string transcription_model = "whisper-1";
  std::chrono::seconds timeout{60};
};

/// OpenAI-compatible chat-completions and audio-transcription client.
class OpenAIBackend final : public ChatBackend {
 public:
  explicit OpenAIBackend(OpenAIConfig config, std::shared_ptr<Clock> clock = nullptr);

  std::string id() const override { return "openai:" + config_.chat_model; }
  bool is_mock() const override { return false; }

  ChatResponse complete(const ChatRequest& request) override;
  Transcript transcribe(std::span<const std::byte> audio, std::string_view media_type) override;
  std::unique_ptr<ChatBackend> fork(std::uint64_t seed,
                                    std::shared_ptr<Clock> clock) const override;

  const OpenAIConfig& config() const noexcept { return config_; }

  /// Request body sent for `request` (exposed for inspection and tests).
  std::string chat_body(const ChatRequest& request) const;

 private:
  std::string api_key() const;

  OpenAIConfig config_;
  std::shared_ptr<Clock> clock_;
};

}  // namespace bimflow::llm
