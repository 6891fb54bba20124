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

#include "bimflow/llm/gateway.hpp"

#include <algorithm>

namespace bimflow::llm {

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, RetryPolicy policy,
                 std::shared_ptr<Clock> clock)
    : backend_(std::move(backend)),
      policy_(policy),
      clock_(clock ? std::move(clock) : steady_clock()) {
  if (!backend_) throw GatewayError(GatewayErrc::InvalidRequest, "gateway needs a backend");
}

ChatResponse Gateway::complete(const ChatRequest& original) {
  validate_request(original);
  ChatRequest request = original;
  if (request.model.empty()) {
    if (auto step = request.tags.find("step"); step != request.tags.end()) {
      if (auto route = routes_.find(step->second); route != routes_.end()) request.model = route->second;
    }
  }
  auto backoff = policy_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    Exchange exchange{request, std::nullopt, {}, attempt};
    try {
      auto response = backend_->complete(request);
      response.attempt = attempt;
      exchange.response = response;
      if (observer_) observer_(exchange);
      return response;
    } catch (const GatewayError& e) {
      exchange.error = e.what();
      if (observer_) observer_(exchange);
      if (!e.transient() || attempt > policy_.max_retries) throw;
      auto wait = e.retry_after().value_or(backoff);
      clock_->sleep_for(std::min(wait, policy_.max_backoff));
      backoff = std::min(policy_.max_backoff,
                         std::chrono::milliseconds(static_cast<std::int64_t>(
                             static_cast<double>(backoff.count()) * policy_.multiplier)));
    }
  }
}

Transcript Gateway::transcribe(std::span<const std::byte> audio, std::string_view media_type) {
  auto backoff = policy_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return backend_->transcribe(audio, media_type);
    } catch (const GatewayError& e) {
      if (!e.transient() || attempt > policy_.max_retries) throw;
      clock_->sleep_for(std::min(e.retry_after().value_or(backoff), policy_.max_backoff));
      backoff = std::min(policy_.max_backoff,
                         std::chrono::milliseconds(static_cast<std::int64_t>(
                             static_cast<double>(backoff.count()) * policy_.multiplier)));
    }
  }
}

void Gateway::register_script(MockScript script) {
  backend_ = std::make_shared<MockBackend>(std::move(script), clock_);
}

Gateway Gateway::fork(std::uint64_t seed, std::shared_ptr<Clock> clock) const {
  auto c = clock ? clock : clock_;
  Gateway g(std::shared_ptr<ChatBackend>(backend_->fork(seed, c)), policy_, c);
  g.observer_ = observer_;
  g.routes_ = routes_;
  return g;
}

void Gateway::set_observer(ExchangeObserver observer) { observer_ = std::move(observer); }
void Gateway::set_model_routes(std::map<std::string, std::string> routes) { routes_ = std::move(routes); }
bool Gateway::is_mock() const { return backend_->is_mock(); }
std::string Gateway::backend_id() const { return backend_->id(); }

}  // namespace bimflow::llm
