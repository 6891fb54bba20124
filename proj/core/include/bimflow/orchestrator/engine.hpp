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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "bimflow/llm/backend.hpp"
#include "bimflow/orchestrator/config.hpp"
#include "bimflow/orchestrator/session.hpp"

namespace bimflow::orchestrator {

/// Loads data overrides named by the config (rules, aliases, slot schemas)
/// on top of the bundled defaults.
std::shared_ptr<const EngineResources> load_resources(const EngineConfig& config);

/// Backend selected by the config: the mock (script file or bundled demo
/// script) or the live OpenAI-compatible client.
std::shared_ptr<llm::ChatBackend> make_backend(const EngineConfig& config);

/// Stable 64-bit mix of a base seed and a label (FNV-1a + splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

/// Session factory and registry. Each session forks the backend with its
/// own seed; mock sessions run on a private virtual clock.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  Engine(EngineConfig config, std::shared_ptr<llm::ChatBackend> backend);

  std::shared_ptr<Session> create_session(std::optional<std::uint64_t> seed = std::nullopt);
  std::shared_ptr<Session> find_session(const std::string& id) const;
  bool close_session(const std::string& id);

  const EngineConfig& config() const noexcept { return resources_->config; }
  std::shared_ptr<const EngineResources> resources() const noexcept { return resources_; }
  bool is_mock() const { return backend_->is_mock(); }
  llm::Transcript transcribe(std::span<const std::byte> audio, std::string_view media_type);

 private:
  std::shared_ptr<const EngineResources> resources_;
  std::shared_ptr<llm::ChatBackend> backend_;
  std::optional<kernel::Project> initial_project_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

}  // namespace bimflow::orchestrator
