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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "bimflow/clock.hpp"
#include "bimflow/llm/types.hpp"

namespace bimflow::llm {

/// One chat/transcription provider. A single call is one attempt; retries
/// belong to the Gateway. Transport failures are reported as transient
/// GatewayErrors.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  virtual std::string id() const = 0;
  virtual bool is_mock() const = 0;

  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual Transcript transcribe(std::span<const std::byte> audio, std::string_view media_type) = 0;

  /// Instance for one session. Stateless backends may return a shallow
  /// copy; the mock gets its own random stream seeded with `seed` and
  /// reports latency on `clock`.
  virtual std::unique_ptr<ChatBackend> fork(std::uint64_t seed,
                                            std::shared_ptr<Clock> clock) const = 0;
};

/// Media types accepted by transcription endpoints.
bool is_supported_audio_type(std::string_view media_type);

}  // namespace bimflow::llm
