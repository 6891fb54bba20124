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
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bimflow/llm/backend.hpp"

namespace bimflow::llm {

enum class FailureMode { MalformedJson, RuleViolation, Timeout };

std::string_view to_string(FailureMode mode);

struct FailureSpec {
  FailureMode mode = FailureMode::Timeout;
  double probability = 0.0;
  // RuleViolation only: candidate rule ids, one picked per injected fault.
  std::vector<std::string> rules;
  // RuleViolation knobs: replacement structural material and thickness.
  std::string violation_material = "structural steel";
  double violation_thickness = 50.0;
};

/// Conjunctive request predicate. Empty members match anything.
struct RuleMatcher {
  enum class Field { Any, System, User };

  std::optional<std::string> substring;
  bool ignore_case = false;
  Field field = Field::Any;
  std::map<std::string, std::string> tags;  // "*" means "present"
  std::optional<std::string> regex;         // searched in the last user message
};

struct MockRule {
  std::string name;
  RuleMatcher matcher;
  // Template text: {{tag}} expands request tags, {{$N}} regex captures,
  // {{{tag}}} inserts a value without JSON escaping.
  std::string response;
  std::optional<FailureSpec> failure;
  std::int64_t latency_ms = 0;
};

struct ScriptedTranscript {
  std::string text;
  std::string language = "en";
  double duration_s = 0.0;
};

struct MockScript {
  std::uint64_t seed = 0;
  std::int64_t default_latency_ms = 0;
  std::vector<MockRule> rules;
  // Keyed by lowercase hex SHA-256 of the audio bytes.
  std::map<std::string, ScriptedTranscript> transcripts;
};

/// Rule ids understood by FailureMode::RuleViolation.
const std::vector<std::string>& known_violation_rules();

/// Throws GatewayError(InvalidScript) on malformed scripts.
MockScript parse_mock_script(const nlohmann::json& doc);
MockScript load_mock_script(const std::filesystem::path& path);
void validate_script(const MockScript& script);

std::string sha256_hex(std::span<const std::byte> data);

/// Deterministic scripted backend: first matching rule wins, failures are
/// drawn from a seeded stream so a fixed seed and request sequence always
/// produce the same responses.
class MockBackend final : public ChatBackend {
 public:
  explicit MockBackend(MockScript script, std::shared_ptr<Clock> clock = nullptr);
  MockBackend(MockScript script, std::uint64_t seed, std::shared_ptr<Clock> clock);

  std::string id() const override { return "mock"; }
  bool is_mock() const override { return true; }

  ChatResponse complete(const ChatRequest& request) override;
  Transcript transcribe(std::span<const std::byte> audio, std::string_view media_type) override;
  std::unique_ptr<ChatBackend> fork(std::uint64_t seed,
                                    std::shared_ptr<Clock> clock) const override;

  const MockScript& script() const noexcept { return *script_; }

 private:
  double next_uniform();

  std::shared_ptr<const MockScript> script_;
  std::vector<std::regex> compiled_;
  std::mutex mutex_;  // guards rng_ for concurrent callers
  std::mt19937_64 rng_;
  std::shared_ptr<Clock> clock_;
};

/// Applies the RuleViolation mutation to a wall-detail JSON reply. Returns
/// the reply unchanged when it is not a wall-detail object.
std::string inject_rule_violation(const std::string& reply, const std::string& rule_id,
                                  const FailureSpec& failure);

}  // namespace bimflow::llm
