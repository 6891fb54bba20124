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

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bimflow/clock.hpp"
#include "bimflow/compliance/rules.hpp"
#include "bimflow/grounding/matcher.hpp"
#include "bimflow/kernel/types.hpp"
#include "bimflow/llm/gateway.hpp"
#include "bimflow/nlu/types.hpp"
#include "bimflow/orchestrator/config.hpp"
#include "bimflow/orchestrator/events.hpp"
#include "bimflow/orchestrator/plan.hpp"
#include "bimflow/orchestrator/trace.hpp"

namespace bimflow::orchestrator {

/// Immutable configuration shared by all sessions of an engine.
struct EngineResources {
  EngineConfig config;
  nlu::SchemaRegistry schemas;
  grounding::AliasTable aliases;
  compliance::RuleParams rule_params;
  compliance::RuleRegistry rules;
};

enum class Speaker { User, System };

struct DialogueTurn {
  int seq = 0;
  Speaker speaker = Speaker::User;
  std::string text;
  std::optional<int> trace_turn;
};

struct TurnOutcome {
  enum class Kind { Completed, NeedsAnswer, Failed };

  Kind kind = Kind::Failed;
  int turn = 0;
  std::optional<kernel::ExecutionResult> execution;
  // Present on Completed whenever the plan included Check.
  std::optional<compliance::CheckReport> report;
  std::optional<nlu::ClarificationQuestion> question;
  std::string reason;
  // System reply shown to the user.
  std::string message;
  int attempts = 0;
};

std::string_view to_string(TurnOutcome::Kind kind);
void to_json(nlohmann::json& j, const TurnOutcome& outcome);
void to_json(nlohmann::json& j, const DialogueTurn& turn);

/// One dialogue with its own project, model gateway and event stream. Turns
/// are serialized; snapshots may be read from any thread meanwhile.
class Session {
 public:
  Session(std::string id, std::shared_ptr<const EngineResources> resources, llm::Gateway gateway,
          kernel::Project project, std::shared_ptr<Clock> clock);

  const std::string& id() const noexcept { return id_; }

  /// Throws OrchestratorError(ProtocolError) while a question is pending.
  TurnOutcome handle_utterance(std::string_view text);
  /// Throws OrchestratorError(ProtocolError) when no question is pending.
  TurnOutcome answer_question(std::string_view answer);

  EventStream& events() noexcept { return events_; }
  void close();

  kernel::Project project() const;
  std::optional<PipelineTrace> trace(int turn) const;
  std::vector<DialogueTurn> history() const;
  std::optional<nlu::ClarificationQuestion> pending_question() const;
  int turn_count() const;

 private:
  struct TurnState;

  TurnOutcome run_from_fill(TurnState& t, std::optional<std::string> answer);
  TurnOutcome run_wall_detail(TurnState& t);
  TurnOutcome run_modify(TurnState& t);
  TurnOutcome run_transform(TurnState& t);
  TurnOutcome run_window(TurnState& t);
  TurnOutcome run_delete_column(TurnState& t);

  void begin_step(TurnState& t, Step step, nlohmann::json input);
  void end_step(TurnState& t, nlohmann::json output);
  void skip_step(TurnState& t, Step step, const std::string& reason);
  void skip_rest(TurnState& t, const std::string& reason);
  TurnOutcome finish(TurnState& t, TurnOutcome outcome);
  TurnOutcome fail(TurnState& t, const std::string& reason);

  grounding::Vocabulary vocabulary() const;
  std::vector<std::string> dialogue_context() const;
  void add_turn(Speaker speaker, std::string text, std::optional<int> trace_turn);
  std::string suggest_name(const nlu::TaskFrame& frame, const std::string& scope) const;

  std::string id_;
  std::shared_ptr<const EngineResources> resources_;
  llm::Gateway gateway_;
  std::shared_ptr<Clock> clock_;
  EventStream events_;

  std::mutex turn_mutex_;
  mutable std::mutex state_mutex_;
  kernel::Project project_;
  std::vector<DialogueTurn> history_;
  std::map<int, PipelineTrace> traces_;
  std::optional<nlu::ClarificationQuestion> pending_;
  std::optional<nlu::TaskFrame> pending_frame_;
  int turn_counter_ = 0;
  bool closed_ = false;

  // Exchanges captured by the gateway observer for the running step.
  std::vector<nlohmann::json> exchanges_;
};

}  // namespace bimflow::orchestrator
