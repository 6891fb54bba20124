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
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bimflow/grounding/structuring.hpp"
#include "bimflow/llm/gateway.hpp"
#include "bimflow/llm/openai_backend.hpp"
#include "bimflow/nlu/interpreter.hpp"

namespace bimflow::orchestrator {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  // Directory of static console files served under "/", if any.
  std::optional<std::filesystem::path> static_dir;
  int workers = 2;
};

struct EngineConfig {
  enum class Backend { Mock, Live };

  Backend backend = Backend::Mock;
  // Mock script; the bundled demo script when absent.
  std::optional<std::filesystem::path> mock_script;
  llm::OpenAIConfig openai;
  llm::RetryPolicy transport_retry;
  // Pipeline step name ("interpret", "fill", "structure") -> model name.
  std::map<std::string, std::string> step_models;

  grounding::StructuringMode mode = grounding::StructuringMode::Fused;
  double match_threshold = grounding::kDefaultThreshold;
  int repair_budget = 2;
  int retry_budget = 5;
  bool check_enabled = true;
  bool strict_rc_threshold = false;
  nlu::NluConfig nlu;

  // Optional overrides of the bundled data files.
  std::optional<std::filesystem::path> rules;
  std::optional<std::filesystem::path> aliases;
  std::optional<std::filesystem::path> slot_schemas;
  // Project loaded into every new session instead of the seeded library.
  std::optional<std::filesystem::path> project;

  std::uint64_t seed = 0;
  ServerConfig server;
};

/// Relative paths in the document are resolved against `base_dir`.
/// Unknown keys are rejected so typos surface early.
EngineConfig engine_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
EngineConfig load_engine_config(const std::filesystem::path& path);

}  // namespace bimflow::orchestrator
