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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "bimflow/clock.hpp"
#include "bimflow/llm/backend.hpp"
#include "bimflow/llm/mock_backend.hpp"

namespace bimflow::llm {

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

/// One backend attempt as seen by the gateway, for audit logs.
struct Exchange {
  ChatRequest request;
  std::optional<ChatResponse> response;
  std::string error;
  int attempt = 1;
};

using ExchangeObserver = std::function<void(const Exchange&)>;

/// Front door for every model call. Adds retry with exponential backoff
/// for transient transport failures and reports each attempt to an
/// optional observer. Well-formed responses are never retried.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy policy = {},
                   std::shared_ptr<Clock> clock = nullptr);

  ChatResponse complete(const ChatRequest& request);
  Transcript transcribe(std::span<const std::byte> audio, std::string_view media_type);

  /// Replaces the backend with a mock driven by `script`; any previously
  /// registered script is discarded.
  void register_script(MockScript script);

  /// Session-local gateway sharing configuration but not random state.
  Gateway fork(std::uint64_t seed, std::shared_ptr<Clock> clock) const;

  void set_observer(ExchangeObserver observer);
  /// Model used for requests whose "step" tag matches and whose model field
  /// is empty.
  void set_model_routes(std::map<std::string, std::string> routes);
  bool is_mock() const;
  std::string backend_id() const;
  const RetryPolicy& policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<ChatBackend> backend_;
  RetryPolicy policy_;
  std::shared_ptr<Clock> clock_;
  ExchangeObserver observer_;
  std::map<std::string, std::string> routes_;
};

}  // namespace bimflow::llm
