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

#include "bimflow/orchestrator/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bimflow::orchestrator {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

}  // namespace

EngineConfig engine_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"backend", "mock_script", "openai", "models", "transport_retries", "match_threshold",
                  "repair_budget", "retry_budget", "check_enabled", "strict_rc_threshold", "mode", "rules",
                  "aliases", "slot_schemas", "project", "seed", "server", "nlu"},
                 "config");
  EngineConfig cfg;
  try {
    const auto backend = doc.value("backend", std::string("mock"));
    if (backend == "mock") {
      cfg.backend = EngineConfig::Backend::Mock;
    } else if (backend == "live") {
      cfg.backend = EngineConfig::Backend::Live;
    } else {
      throw ConfigError("backend must be 'mock' or 'live'");
    }
    if (doc.contains("mock_script")) cfg.mock_script = resolve(base_dir, doc["mock_script"].get<std::string>());
    if (doc.contains("openai")) {
      const auto& o = doc["openai"];
      reject_unknown(o, {"chat_url", "transcription_url", "api_key_env", "chat_model", "transcription_model", "timeout_s"},
                     "openai");
      cfg.openai.chat_url = o.value("chat_url", cfg.openai.chat_url);
      cfg.openai.transcription_url = o.value("transcription_url", cfg.openai.transcription_url);
      cfg.openai.api_key_env = o.value("api_key_env", cfg.openai.api_key_env);
      cfg.openai.chat_model = o.value("chat_model", cfg.openai.chat_model);
      cfg.openai.transcription_model = o.value("transcription_model", cfg.openai.transcription_model);
      cfg.openai.timeout = std::chrono::seconds(o.value("timeout_s", static_cast<std::int64_t>(cfg.openai.timeout.count())));
    }
    if (doc.contains("models")) cfg.step_models = doc["models"].get<std::map<std::string, std::string>>();
    cfg.transport_retry.max_retries = doc.value("transport_retries", cfg.transport_retry.max_retries);
    cfg.match_threshold = doc.value("match_threshold", cfg.match_threshold);
    cfg.repair_budget = doc.value("repair_budget", cfg.repair_budget);
    cfg.retry_budget = doc.value("retry_budget", cfg.retry_budget);
    cfg.check_enabled = doc.value("check_enabled", cfg.check_enabled);
    cfg.strict_rc_threshold = doc.value("strict_rc_threshold", cfg.strict_rc_threshold);
    if (doc.contains("mode")) {
      auto mode = grounding::parse_structuring_mode(doc["mode"].get<std::string>());
      if (!mode) throw ConfigError("mode must be 'Fused' or 'Split'");
      cfg.mode = *mode;
    }
    if (doc.contains("rules")) cfg.rules = resolve(base_dir, doc["rules"].get<std::string>());
    if (doc.contains("aliases")) cfg.aliases = resolve(base_dir, doc["aliases"].get<std::string>());
    if (doc.contains("slot_schemas")) cfg.slot_schemas = resolve(base_dir, doc["slot_schemas"].get<std::string>());
    if (doc.contains("project")) cfg.project = resolve(base_dir, doc["project"].get<std::string>());
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("nlu")) {
      const auto& n = doc["nlu"];
      reject_unknown(n, {"confidence_threshold", "context_turns", "fill_temperature"}, "nlu");
      cfg.nlu.confidence_threshold = n.value("confidence_threshold", cfg.nlu.confidence_threshold);
      cfg.nlu.context_turns = n.value("context_turns", cfg.nlu.context_turns);
      cfg.nlu.fill_temperature = n.value("fill_temperature", cfg.nlu.fill_temperature);
    }
    if (doc.contains("server")) {
      const auto& s = doc["server"];
      reject_unknown(s, {"host", "port", "static_dir", "workers"}, "server");
      cfg.server.host = s.value("host", cfg.server.host);
      cfg.server.port = s.value("port", cfg.server.port);
      if (s.contains("static_dir")) cfg.server.static_dir = resolve(base_dir, s["static_dir"].get<std::string>());
      cfg.server.workers = s.value("workers", cfg.server.workers);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.match_threshold < 0.0 || cfg.match_threshold > 1.0) throw ConfigError("match_threshold must be within [0, 1]");
  if (cfg.repair_budget < 0) throw ConfigError("repair_budget must be >= 0");
  if (cfg.retry_budget < 1) throw ConfigError("retry_budget must be >= 1");
  if (cfg.transport_retry.max_retries < 0) throw ConfigError("transport_retries must be >= 0");
  if (cfg.server.workers < 1) throw ConfigError("server.workers must be >= 1");
  return cfg;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc = json::parse(buffer.str(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config '" + path.string() + "' is not valid JSON");
  return engine_config_from_json(doc, path.parent_path());
}

}  // namespace bimflow::orchestrator
