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

#include "bimflow/orchestrator/engine.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "bimflow/bundled_data.hpp"
#include "bimflow/kernel/materials.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/llm/mock_backend.hpp"
#include "bimflow/llm/openai_backend.hpp"

namespace bimflow::orchestrator {

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  return doc;
}

}  // namespace

std::shared_ptr<const EngineResources> load_resources(const EngineConfig& config) {
  auto r = std::make_shared<EngineResources>();
  r->config = config;
  try {
    r->schemas = config.slot_schemas ? nlu::schema_registry_from_json(read_json(*config.slot_schemas))
                                     : nlu::default_schema_registry();
    r->aliases = config.aliases ? grounding::alias_table_from_json(read_json(*config.aliases))
                                : grounding::default_alias_table();
    r->rule_params = config.rules ? compliance::rule_params_from_json(read_json(*config.rules))
                                  : compliance::default_rule_params();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid data file: ") + e.what());
  }
  if (config.strict_rc_threshold) r->rule_params.strict_rc_threshold = true;
  r->rules = compliance::default_registry(r->rule_params);
  return r;
}

std::shared_ptr<llm::ChatBackend> make_backend(const EngineConfig& config) {
  if (config.backend == EngineConfig::Backend::Live) {
    return std::make_shared<llm::OpenAIBackend>(config.openai);
  }
  auto script = config.mock_script
                    ? llm::load_mock_script(*config.mock_script)
                    : llm::parse_mock_script(nlohmann::json::parse(bundled::kDemoScriptJson));
  return std::make_shared<llm::MockBackend>(std::move(script));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = base ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Engine::Engine(EngineConfig config) : Engine(config, make_backend(config)) {}

Engine::Engine(EngineConfig config, std::shared_ptr<llm::ChatBackend> backend)
    : resources_(load_resources(config)), backend_(std::move(backend)) {
  if (!backend_) throw ConfigError("engine needs a backend");
  if (config.project) initial_project_ = kernel::load_project(*config.project);
}

std::shared_ptr<Session> Engine::create_session(std::optional<std::uint64_t> seed) {
  std::lock_guard lock(mutex_);
  const auto n = next_session_++;
  const std::string id = "s-" + std::to_string(n);
  const auto session_seed = seed.value_or(derive_seed(resources_->config.seed, "session-" + std::to_string(n)));
  std::shared_ptr<Clock> clock =
      backend_->is_mock() ? std::shared_ptr<Clock>(std::make_shared<VirtualClock>()) : steady_clock();
  llm::Gateway gateway(std::shared_ptr<llm::ChatBackend>(backend_->fork(session_seed, clock)),
                       resources_->config.transport_retry, clock);
  gateway.set_model_routes(resources_->config.step_models);
  auto session = std::make_shared<Session>(id, resources_, std::move(gateway),
                                           initial_project_ ? *initial_project_ : kernel::make_seeded_project(),
                                           clock);
  sessions_[id] = session;
  return session;
}

std::shared_ptr<Session> Engine::find_session(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool Engine::close_session(const std::string& id) {
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    session = it->second;
    sessions_.erase(it);
  }
  session->close();
  return true;
}

llm::Transcript Engine::transcribe(std::span<const std::byte> audio, std::string_view media_type) {
  llm::Gateway gateway(backend_, resources_->config.transport_retry,
                       backend_->is_mock() ? std::shared_ptr<Clock>(std::make_shared<VirtualClock>())
                                           : steady_clock());
  return gateway.transcribe(audio, media_type);
}

}  // namespace bimflow::orchestrator
