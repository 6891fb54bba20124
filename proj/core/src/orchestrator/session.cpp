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

#include "bimflow/orchestrator/session.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bimflow/compliance/rules.hpp"
#include "bimflow/grounding/structuring.hpp"
#include "bimflow/grounding/validator.hpp"
#include "bimflow/kernel/kernel.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/nlu/interpreter.hpp"
#include "bimflow/orchestrator/retry_loop.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::orchestrator {

using nlohmann::json;

namespace {

json execution_json(const kernel::ExecutionResult& r) {
  return json{{"mutated_ids", r.mutated_ids}, {"produced_spec", r.produced_spec}, {"summary", r.summary}};
}

std::string title_case(std::string_view text) {
  std::string out(text);
  bool start = true;
  for (auto& c : out) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) && start) c = static_cast<char>(std::toupper(uc));
    start = std::isspace(uc) || c == '-';
  }
  return out;
}

std::string structural_material_of(const kernel::WallDetailSpec& spec) {
  for (const auto& layer : spec.layers) {
    if (layer.layer_type == kernel::LayerFunction::Structure) return layer.material;
  }
  return {};
}

std::string failed_messages(const compliance::CheckReport& report) {
  std::string out;
  for (const auto* v : report.failed()) {
    if (!out.empty()) out += "; ";
    out += v->rule_id + ": " + v->message;
  }
  return out;
}

}  // namespace

std::string_view to_string(TurnOutcome::Kind kind) {
  switch (kind) {
    case TurnOutcome::Kind::Completed: return "Completed";
    case TurnOutcome::Kind::NeedsAnswer: return "NeedsAnswer";
    case TurnOutcome::Kind::Failed: return "Failed";
  }
  return "?";
}

void to_json(json& j, const TurnOutcome& o) {
  j = json{{"kind", to_string(o.kind)},
           {"turn", o.turn},
           {"reason", o.reason},
           {"message", o.message},
           {"attempts", o.attempts}};
  j["execution"] = o.execution ? execution_json(*o.execution) : json(nullptr);
  j["report"] = o.report ? json(*o.report) : json(nullptr);
  j["question"] = o.question ? json(*o.question) : json(nullptr);
}

void to_json(json& j, const DialogueTurn& t) {
  j = json{{"seq", t.seq},
           {"speaker", t.speaker == Speaker::User ? "user" : "system"},
           {"text", t.text},
           {"trace_turn", t.trace_turn ? json(*t.trace_turn) : json(nullptr)}};
}

struct Session::TurnState {
  int turn = 0;
  PipelineTrace trace;
  nlu::TaskFrame frame;
  std::vector<PlannedStep> plan;
  int attempt = 1;
  std::optional<Step> current;
  std::int64_t started_ms = 0;
  json input;
};

Session::Session(std::string id, std::shared_ptr<const EngineResources> resources, llm::Gateway gateway,
                 kernel::Project project, std::shared_ptr<Clock> clock)
    : id_(std::move(id)),
      resources_(std::move(resources)),
      gateway_(std::move(gateway)),
      clock_(clock ? std::move(clock) : steady_clock()),
      events_(id_),
      project_(std::move(project)) {
  gateway_.set_observer([this](const llm::Exchange& ex) {
    json entry{{"attempt", ex.attempt}, {"request", ex.request}};
    entry["response"] = ex.response ? json(*ex.response) : json(nullptr);
    if (!ex.error.empty()) entry["error"] = ex.error;
    exchanges_.push_back(std::move(entry));
  });
}

// ---------------------------------------------------------------- snapshots

kernel::Project Session::project() const {
  std::lock_guard lock(state_mutex_);
  return project_;
}

std::optional<PipelineTrace> Session::trace(int turn) const {
  std::lock_guard lock(state_mutex_);
  auto it = traces_.find(turn);
  if (it == traces_.end()) return std::nullopt;
  return it->second;
}

std::vector<DialogueTurn> Session::history() const {
  std::lock_guard lock(state_mutex_);
  return history_;
}

std::optional<nlu::ClarificationQuestion> Session::pending_question() const {
  std::lock_guard lock(state_mutex_);
  return pending_;
}

int Session::turn_count() const {
  std::lock_guard lock(state_mutex_);
  return turn_counter_;
}

void Session::close() {
  {
    std::lock_guard lock(state_mutex_);
    closed_ = true;
  }
  events_.close();
}

grounding::Vocabulary Session::vocabulary() const {
  std::lock_guard lock(state_mutex_);
  return grounding::Vocabulary{project_.material_library, resources_->aliases,
                               resources_->config.match_threshold};
}

std::vector<std::string> Session::dialogue_context() const {
  std::lock_guard lock(state_mutex_);
  const std::size_t n = resources_->config.nlu.context_turns;
  const std::size_t from = history_.size() > n ? history_.size() - n : 0;
  std::vector<std::string> out;
  for (std::size_t i = from; i < history_.size(); ++i) {
    out.push_back((history_[i].speaker == Speaker::User ? "User: " : "System: ") + history_[i].text);
  }
  return out;
}

void Session::add_turn(Speaker speaker, std::string text, std::optional<int> trace_turn) {
  std::lock_guard lock(state_mutex_);
  DialogueTurn t;
  t.seq = static_cast<int>(history_.size()) + 1;
  t.speaker = speaker;
  t.text = std::move(text);
  t.trace_turn = trace_turn;
  history_.push_back(std::move(t));
}

std::string Session::suggest_name(const nlu::TaskFrame& frame, const std::string& scope) const {
  std::string base = title_case(frame.text("structural_material").value_or("Generic"));
  if (auto ins = frame.text("insulation_method")) base += " " + title_case(*ins) + " Insulated";
  base += " Wall";
  if (auto t = frame.number("min_thickness")) base += " " + util::format_number(*t) + " mm";
  if (auto loc = frame.text("location")) base += " (" + *loc + ")";

  std::lock_guard lock(state_mutex_);
  std::string name = base;
  for (int k = 2;; ++k) {
    const auto* existing = project_.find_wall_type_by_name(name);
    if (existing == nullptr || existing->created_in == scope) return name;
    name = base + " #" + std::to_string(k);
  }
}

// ---------------------------------------------------------------- trace steps

void Session::begin_step(TurnState& t, Step step, json input) {
  t.current = step;
  t.started_ms = clock_->now_ms();
  t.input = std::move(input);
  exchanges_.clear();
  events_.publish("step_started", t.turn, {{"step", to_string(step)}, {"attempt", t.attempt}});
}

void Session::end_step(TurnState& t, json output) {
  if (!t.current) return;
  StepRecord record;
  record.step = *t.current;
  record.attempt = t.attempt;
  record.input = std::move(t.input);
  record.output = std::move(output);
  record.exchanges = std::move(exchanges_);
  exchanges_.clear();
  record.duration_ms = clock_->now_ms() - t.started_ms;
  events_.publish("step_completed", t.turn,
                  {{"step", to_string(record.step)},
                   {"attempt", record.attempt},
                   {"duration_ms", record.duration_ms},
                   {"output", record.output}});
  t.trace.steps.push_back(std::move(record));
  t.current.reset();
}

void Session::skip_step(TurnState& t, Step step, const std::string& reason) {
  StepRecord record;
  record.step = step;
  record.attempt = t.attempt;
  record.skipped = true;
  record.skip_reason = reason;
  t.trace.steps.push_back(std::move(record));
  events_.publish("step_skipped", t.turn,
                  {{"step", to_string(step)}, {"attempt", t.attempt}, {"reason", reason}});
}

void Session::skip_rest(TurnState& t, const std::string& reason) {
  std::size_t next = 0;
  for (const auto& r : t.trace.steps) {
    if (r.attempt != t.attempt) continue;
    auto pos = static_cast<std::size_t>(
        std::find(kAllSteps.begin(), kAllSteps.end(), r.step) - kAllSteps.begin());
    next = std::max(next, pos + 1);
  }
  for (std::size_t i = next; i < kAllSteps.size(); ++i) skip_step(t, kAllSteps[i], reason);
}

TurnOutcome Session::finish(TurnState& t, TurnOutcome outcome) {
  outcome.turn = t.turn;
  if (outcome.attempts == 0) outcome.attempts = t.attempt;
  t.trace.outcome = std::string(to_string(outcome.kind));
  {
    std::lock_guard lock(state_mutex_);
    traces_[t.turn] = t.trace;
  }
  add_turn(Speaker::System, outcome.message, t.turn);
  switch (outcome.kind) {
    case TurnOutcome::Kind::Completed:
      events_.publish("turn_completed", t.turn, {{"outcome", outcome}});
      break;
    case TurnOutcome::Kind::Failed:
      events_.publish("turn_failed", t.turn, {{"outcome", outcome}});
      break;
    case TurnOutcome::Kind::NeedsAnswer:
      events_.publish("question_pending", t.turn, {{"question", *outcome.question}});
      break;
  }
  return outcome;
}

TurnOutcome Session::fail(TurnState& t, const std::string& reason) {
  if (t.current) end_step(t, {{"error", reason}});
  skip_rest(t, "turn failed");
  TurnOutcome outcome;
  outcome.kind = TurnOutcome::Kind::Failed;
  outcome.reason = reason;
  outcome.message = "I could not complete the request: " + reason;
  return finish(t, std::move(outcome));
}

// ---------------------------------------------------------------- turns

namespace {

template <typename Fn>
TurnOutcome guarded(Fn&& fn, const std::function<TurnOutcome(const std::string&)>& on_error) {
  try {
    return fn();
  } catch (const llm::GatewayError& e) {
    return on_error(e.what());
  } catch (const nlu::NluError& e) {
    return on_error(e.what());
  } catch (const kernel::KernelError& e) {
    return on_error(e.what());
  }
}

}  // namespace

TurnOutcome Session::handle_utterance(std::string_view text) {
  std::lock_guard turn_lock(turn_mutex_);
  TurnState t;
  {
    std::lock_guard lock(state_mutex_);
    if (closed_) throw OrchestratorError(OrchestratorErrc::SessionClosed, "session " + id_ + " is closed");
    if (pending_) {
      throw OrchestratorError(OrchestratorErrc::ProtocolError,
                              "a question about '" + pending_->slot + "' is pending; answer it first");
    }
    t.turn = ++turn_counter_;
  }
  const auto context = dialogue_context();
  add_turn(Speaker::User, std::string(text), t.turn);
  t.trace.session_id = id_;
  t.trace.turn = t.turn;
  t.trace.utterance = std::string(text);
  events_.publish("turn_started", t.turn, {{"kind", "utterance"}, {"text", text}});

  const auto& config = resources_->config;
  return guarded(
      [&]() -> TurnOutcome {
        begin_step(t, Step::Interpret, {{"utterance", text}, {"context", context}});
        auto cls = nlu::classify_task(gateway_, text, context, config.nlu);
        t.trace.task = cls.task;
        if (cls.task == nlu::TaskClass::Unknown) {
          end_step(t, {{"task", "Unknown"}, {"confidence", cls.confidence}});
          skip_rest(t, "task not recognised");
          std::string supported;
          for (auto task : nlu::known_tasks()) {
            if (!supported.empty()) supported += "; ";
            supported += std::string(nlu::describe(task));
          }
          TurnOutcome outcome;
          outcome.kind = TurnOutcome::Kind::Failed;
          outcome.reason = "task not recognised";
          outcome.message = "I did not recognise that request. I can help with: " + supported + ".";
          return finish(t, std::move(outcome));
        }
        const auto& schema = resources_->schemas.at(cls.task);
        auto frame = nlu::extract_slots(gateway_, text, cls.task, schema, config.nlu);
        frame.dialogue_context = context;
        end_step(t, {{"task", nlu::to_string(cls.task)}, {"confidence", cls.confidence}, {"frame", frame}});
        t.frame = std::move(frame);
        t.plan = plan_steps(cls.task, config.check_enabled);
        return run_from_fill(t, std::nullopt);
      },
      [&](const std::string& why) { return fail(t, why); });
}

TurnOutcome Session::answer_question(std::string_view answer) {
  std::lock_guard turn_lock(turn_mutex_);
  TurnState t;
  std::string slot;
  {
    std::lock_guard lock(state_mutex_);
    if (closed_) throw OrchestratorError(OrchestratorErrc::SessionClosed, "session " + id_ + " is closed");
    if (!pending_ || !pending_frame_) {
      throw OrchestratorError(OrchestratorErrc::ProtocolError, "no question is pending");
    }
    t.turn = ++turn_counter_;
    t.frame = *pending_frame_;
    slot = pending_->slot;
  }
  add_turn(Speaker::User, std::string(answer), t.turn);
  t.trace.session_id = id_;
  t.trace.turn = t.turn;
  t.trace.utterance = std::string(answer);
  t.trace.task = t.frame.task;
  t.plan = plan_steps(t.frame.task, resources_->config.check_enabled);
  events_.publish("turn_started", t.turn, {{"kind", "answer"}, {"text", answer}, {"slot", slot}});
  skip_step(t, Step::Interpret, "resumed after user answer");
  return guarded([&]() { return run_from_fill(t, std::string(answer)); },
                 [&](const std::string& why) { return fail(t, why); });
}

TurnOutcome Session::run_from_fill(TurnState& t, std::optional<std::string> answer) {
  const auto& config = resources_->config;
  const auto& schema = resources_->schemas.at(t.frame.task);
  const auto& fill_plan = planned(t.plan, Step::Fill);

  auto ask = [&](nlu::ClarificationQuestion q, json output) {
    {
      std::lock_guard lock(state_mutex_);
      pending_ = q;
      pending_frame_ = t.frame;
    }
    end_step(t, std::move(output));
    skip_rest(t, "awaiting user answer");
    TurnOutcome outcome;
    outcome.kind = TurnOutcome::Kind::NeedsAnswer;
    outcome.question = q;
    outcome.message = q.text;
    return finish(t, std::move(outcome));
  };

  if (fill_plan.skipped) {
    skip_step(t, Step::Fill, fill_plan.reason);
  } else {
    begin_step(t, Step::Fill, {{"frame", t.frame}, {"answer", answer ? json(*answer) : json(nullptr)}});
    if (answer) {
      nlu::ClarificationQuestion question;
      {
        std::lock_guard lock(state_mutex_);
        question = *pending_;
      }
      try {
        t.frame = nlu::apply_answer(t.frame, question, *answer, schema);
      } catch (const nlu::NluError& e) {
        if (e.code() != nlu::NluErrc::UnparseableAnswer && e.code() != nlu::NluErrc::UnknownSlot) throw;
        ++question.attempt;
        return ask(question, {{"error", e.what()}, {"question", question}});
      }
      std::lock_guard lock(state_mutex_);
      pending_.reset();
      pending_frame_.reset();
    }
    auto filled = nlu::fill_missing(gateway_, t.frame, schema, config.nlu);
    t.frame = std::move(filled.frame);
    if (!filled.questions.empty()) {
      return ask(filled.questions.front(), {{"frame", t.frame}, {"questions", filled.questions}});
    }
    end_step(t, {{"frame", t.frame}});
  }
  if (!t.frame.ready()) {
    std::string missing;
    for (const auto& m : t.frame.missing) missing += (missing.empty() ? "" : ", ") + m;
    return fail(t, "missing information: " + missing);
  }

  switch (t.frame.task) {
    case nlu::TaskClass::CreateWallDetail: return run_wall_detail(t);
    case nlu::TaskClass::ModifyWall: return run_modify(t);
    case nlu::TaskClass::SimpleTransform: return run_transform(t);
    case nlu::TaskClass::PlaceWindow: return run_window(t);
    case nlu::TaskClass::DeleteColumn: return run_delete_column(t);
    case nlu::TaskClass::Unknown: break;
  }
  return fail(t, "task not recognised");
}

namespace {

// Validates a wall-detail reply and repairs it within the budget.
struct StructuringResult {
  std::optional<kernel::WallDetailSpec> spec;
  std::vector<grounding::Violation> violations;
  int repairs = 0;
};

StructuringResult structure_with_repair(llm::Gateway& gateway, const llm::ChatRequest& original,
                                        int budget) {
  grounding::RepairState state;
  state.budget = budget;
  llm::ChatRequest request = original;
  for (;;) {
    auto reply = gateway.complete(request);
    auto payload = grounding::validate_payload(reply.content);
    if (payload.ok()) return {payload.parsed, {}, state.attempt};
    auto next = grounding::repair(state, payload, original);
    if (std::holds_alternative<grounding::Exhausted>(next)) {
      return {std::nullopt, payload.violations, state.attempt};
    }
    request = std::get<llm::ChatRequest>(std::move(next));
  }
}

std::string violation_summary(const std::vector<grounding::Violation>& violations) {
  std::string out;
  for (const auto& v : violations) out += (out.empty() ? "" : "; ") + grounding::format_violation(v);
  return out;
}

}  // namespace

TurnOutcome Session::run_wall_detail(TurnState& t) {
  const auto& config = resources_->config;
  const auto vocab = vocabulary();

  begin_step(t, Step::Match, {{"frame", t.frame}});
  auto [grounded, resolved] = grounding::resolve_frame(t.frame, vocab);
  t.frame = std::move(grounded);
  json matches = json::array();
  for (const auto& m : resolved.matches) {
    matches.push_back({{"query", m.query},
                       {"matched", m.matched ? json(m.matched->name) : json(nullptr)},
                       {"score", m.score},
                       {"method", grounding::to_string(m.method)}});
  }
  end_step(t, {{"frame", t.frame}, {"matches", matches}, {"unmatched", resolved.unmatched}});

  const auto ctx = compliance::make_context(t.frame.text("structural_material").value_or(""),
                                            t.frame.number("min_thickness"), resources_->rule_params, &vocab);
  const std::string scope = id_ + "#" + std::to_string(t.turn);
  const std::string name = suggest_name(t.frame, scope);
  const auto target = t.frame.text("target_instance");
  const auto& check_plan = planned(t.plan, Step::Check);

  RetryCallbacks cb;
  cb.structure = [&](int attempt, const std::vector<std::string>& feedback) -> StructureOutcome {
    t.attempt = attempt;
    if (attempt > 1) {
      for (auto step : {Step::Interpret, Step::Fill, Step::Match}) {
        skip_step(t, step, "retry re-enters at Structure");
      }
    }
    begin_step(t, Step::Structure,
               {{"mode", grounding::to_string(config.mode)}, {"wall_detail_name", name}, {"feedback", feedback}});
    grounding::StructuringInput input{&t.frame, &vocab, name, feedback};
    auto request = grounding::build_structuring_prompt(input, config.mode);
    auto result = structure_with_repair(gateway_, request, config.repair_budget);
    if (!result.spec) {
      const std::string why = "structured reply still invalid after " + std::to_string(result.repairs) +
                              " repairs: " + violation_summary(result.violations);
      end_step(t, {{"error", why}, {"violations", result.violations}});
      return {std::nullopt, why};
    }
    auto spec = grounding::canonicalize_materials(*result.spec, vocab);
    end_step(t, {{"spec", spec}, {"repairs", result.repairs}});
    return {spec, {}};
  };
  cb.execute = [&](const kernel::WallDetailSpec& spec, int) {
    begin_step(t, Step::Execute, {{"spec", spec}});
    kernel::ExecutionResult result;
    {
      std::lock_guard lock(state_mutex_);
      result = kernel::apply_wall_detail(project_, spec, {target, scope});
    }
    events_.publish("model_updated", t.turn, {{"mutated_ids", result.mutated_ids}, {"summary", result.summary}});
    end_step(t, execution_json(result));
    if (check_plan.skipped) skip_step(t, Step::Check, check_plan.reason);
    return result;
  };
  if (!check_plan.skipped) {
    cb.check = [&](const kernel::WallDetailSpec& spec, int attempt) {
      begin_step(t, Step::Check, {{"spec", spec}});
      auto report = compliance::run_checks(spec, ctx, resources_->rules, attempt);
      events_.publish("check_report", t.turn, {{"report", report}});
      end_step(t, {{"report", report}});
      return report;
    };
  }
  cb.flag = [&](const kernel::ExecutionResult& result, bool compliant) {
    if (result.mutated_ids.empty()) return;
    std::lock_guard lock(state_mutex_);
    kernel::set_compliance(project_, result.mutated_ids.front(),
                           compliant ? kernel::ComplianceState::Compliant : kernel::ComplianceState::NonCompliant);
  };

  auto loop = run_retry_loop(cb, config.retry_budget);
  switch (loop.status) {
    case RetryLoopResult::Status::Completed: {
      TurnOutcome outcome;
      outcome.kind = TurnOutcome::Kind::Completed;
      outcome.execution = loop.execution;
      outcome.report = loop.report;
      outcome.attempts = loop.attempts;
      outcome.message = loop.execution->summary + ".";
      if (loop.report) {
        outcome.message += " All checks passed (attempt " + std::to_string(loop.attempts) + ").";
      } else {
        outcome.message += " Compliance check was not run.";
      }
      return finish(t, std::move(outcome));
    }
    case RetryLoopResult::Status::RetryExhausted: {
      TurnOutcome outcome;
      outcome.kind = TurnOutcome::Kind::Failed;
      outcome.execution = loop.execution;
      outcome.report = loop.report;
      outcome.attempts = loop.attempts;
      outcome.reason = "RetryExhausted";
      outcome.message = "No compliant wall detail after " + std::to_string(loop.attempts) +
                        " attempts; the last one was kept and flagged non-compliant (" +
                        (loop.report ? failed_messages(*loop.report) : std::string()) + ").";
      return finish(t, std::move(outcome));
    }
    case RetryLoopResult::Status::StructureFailed:
    case RetryLoopResult::Status::ExecuteFailed:
      break;
  }
  return fail(t, loop.reason);
}

TurnOutcome Session::run_modify(TurnState& t) {
  const auto& config = resources_->config;
  const auto vocab = vocabulary();
  const std::string target = t.frame.text("target_wall_type").value_or("");
  const std::string modification = t.frame.text("modification").value_or("");

  begin_step(t, Step::Match, {{"target_wall_type", target}});
  std::optional<kernel::WallType> type;
  {
    std::lock_guard lock(state_mutex_);
    const auto* found = project_.find_wall_type(target);
    if (found == nullptr) found = project_.find_wall_type_by_name(target);
    if (found != nullptr) type = *found;
  }
  if (!type) return fail(t, "no wall type named '" + target + "'");
  end_step(t, {{"wall_type_id", type->id}, {"wall_detail_name", type->spec.wall_detail_name}});

  const auto ctx = compliance::make_context(structural_material_of(type->spec), std::nullopt,
                                            resources_->rule_params, &vocab);
  const auto& check_plan = planned(t.plan, Step::Check);

  RetryCallbacks cb;
  cb.structure = [&](int attempt, const std::vector<std::string>& feedback) -> StructureOutcome {
    t.attempt = attempt;
    if (attempt > 1) {
      for (auto step : {Step::Interpret, Step::Fill, Step::Match}) {
        skip_step(t, step, "retry re-enters at Structure");
      }
    }
    begin_step(t, Step::Structure, {{"modification", modification}, {"feedback", feedback}});
    auto request = grounding::build_modification_prompt(type->spec, modification, vocab, config.mode, feedback);
    auto result = structure_with_repair(gateway_, request, config.repair_budget);
    if (!result.spec) {
      const std::string why = "structured reply still invalid after " + std::to_string(result.repairs) +
                              " repairs: " + violation_summary(result.violations);
      end_step(t, {{"error", why}, {"violations", result.violations}});
      return {std::nullopt, why};
    }
    auto spec = grounding::canonicalize_materials(*result.spec, vocab);
    end_step(t, {{"spec", spec}, {"repairs", result.repairs}});
    return {spec, {}};
  };
  cb.execute = [&](const kernel::WallDetailSpec& spec, int) {
    begin_step(t, Step::Execute, {{"wall_type_id", type->id}, {"spec", spec}});
    kernel::ExecutionResult result;
    {
      std::lock_guard lock(state_mutex_);
      const auto& updated = kernel::modify_wall_type(project_, type->id, spec);
      result.mutated_ids = {type->id};
      result.produced_spec = updated.spec;
      result.summary = "Updated wall type '" + updated.spec.wall_detail_name + "' (" + type->id +
                       ", revision " + std::to_string(updated.revision) + ")";
    }
    events_.publish("model_updated", t.turn, {{"mutated_ids", result.mutated_ids}, {"summary", result.summary}});
    end_step(t, execution_json(result));
    if (check_plan.skipped) skip_step(t, Step::Check, check_plan.reason);
    return result;
  };
  if (!check_plan.skipped) {
    cb.check = [&](const kernel::WallDetailSpec& spec, int attempt) {
      begin_step(t, Step::Check, {{"spec", spec}});
      auto report = compliance::run_checks(spec, ctx, resources_->rules, attempt);
      events_.publish("check_report", t.turn, {{"report", report}});
      end_step(t, {{"report", report}});
      return report;
    };
  }
  cb.flag = [&](const kernel::ExecutionResult& result, bool compliant) {
    std::lock_guard lock(state_mutex_);
    kernel::set_compliance(project_, result.mutated_ids.front(),
                           compliant ? kernel::ComplianceState::Compliant : kernel::ComplianceState::NonCompliant);
  };

  auto loop = run_retry_loop(cb, config.retry_budget);
  if (loop.status == RetryLoopResult::Status::Completed || loop.status == RetryLoopResult::Status::RetryExhausted) {
    TurnOutcome outcome;
    outcome.execution = loop.execution;
    outcome.report = loop.report;
    outcome.attempts = loop.attempts;
    if (loop.status == RetryLoopResult::Status::Completed) {
      outcome.kind = TurnOutcome::Kind::Completed;
      outcome.message = loop.execution->summary + ".";
    } else {
      outcome.kind = TurnOutcome::Kind::Failed;
      outcome.reason = "RetryExhausted";
      outcome.message = "The modified wall detail still fails the checks after " +
                        std::to_string(loop.attempts) + " attempts (" +
                        (loop.report ? failed_messages(*loop.report) : std::string()) + ").";
    }
    return finish(t, std::move(outcome));
  }
  return fail(t, loop.reason);
}

TurnOutcome Session::run_transform(TurnState& t) {
  const auto& config = resources_->config;
  skip_step(t, Step::Match, planned(t.plan, Step::Match).reason);

  begin_step(t, Step::Structure, {{"frame", t.frame}});
  const auto original = grounding::build_transform_prompt(t.frame);
  grounding::RepairState state;
  state.budget = config.repair_budget;
  auto request = original;
  grounding::TransformCommand command;
  for (;;) {
    auto reply = gateway_.complete(request);
    auto payload = grounding::validate_transform_payload(reply.content);
    if (payload.ok()) {
      command = *payload.parsed;
      break;
    }
    grounding::StructuredPayload wrapped{payload.raw, std::nullopt, payload.violations};
    auto next = grounding::repair(state, wrapped, original);
    if (std::holds_alternative<grounding::Exhausted>(next)) {
      return fail(t, "rotation command still invalid after " + std::to_string(state.attempt) +
                         " repairs: " + violation_summary(payload.violations));
    }
    request = std::get<llm::ChatRequest>(std::move(next));
  }
  end_step(t, {{"command", {{"operation", "rotate"}, {"axis", command.axis}, {"angle_degrees", command.degrees}}},
               {"repairs", state.attempt}});

  begin_step(t, Step::Execute, {{"axis", command.axis}, {"angle_degrees", command.degrees}});
  kernel::ExecutionResult result;
  {
    std::lock_guard lock(state_mutex_);
    result = kernel::rotate_model(project_, command.axis, command.degrees);
  }
  events_.publish("model_updated", t.turn, {{"mutated_ids", result.mutated_ids}, {"summary", result.summary}});
  end_step(t, execution_json(result));
  skip_step(t, Step::Check, planned(t.plan, Step::Check).reason);

  TurnOutcome outcome;
  outcome.kind = TurnOutcome::Kind::Completed;
  outcome.execution = result;
  outcome.attempts = 1;
  outcome.message = result.summary + ".";
  return finish(t, std::move(outcome));
}

TurnOutcome Session::run_window(TurnState& t) {
  skip_step(t, Step::Match, planned(t.plan, Step::Match).reason);
  skip_step(t, Step::Structure, planned(t.plan, Step::Structure).reason);
  const std::string host = t.frame.text("host_wall").value_or("");
  begin_step(t, Step::Execute, {{"host_wall", host}});
  {
    std::lock_guard lock(state_mutex_);
    if (project_.find_instance(host) == nullptr) {
      throw kernel::KernelError(kernel::KernelErrc::NotFound, "no wall instance '" + host + "'");
    }
  }
  kernel::ExecutionResult result;
  result.summary = "Window request on " + host + " recorded; openings are not part of the wall model";
  end_step(t, execution_json(result));
  skip_step(t, Step::Check, planned(t.plan, Step::Check).reason);

  TurnOutcome outcome;
  outcome.kind = TurnOutcome::Kind::Completed;
  outcome.execution = result;
  outcome.attempts = 1;
  outcome.message = result.summary + ".";
  return finish(t, std::move(outcome));
}

TurnOutcome Session::run_delete_column(TurnState& t) {
  skip_step(t, Step::Match, planned(t.plan, Step::Match).reason);
  skip_step(t, Step::Structure, planned(t.plan, Step::Structure).reason);
  const std::string target = t.frame.text("target").value_or("");
  begin_step(t, Step::Execute, {{"target", target}});
  throw kernel::KernelError(kernel::KernelErrc::NotFound,
                            "no column '" + target + "'; the model contains no columns");
}

}  // namespace bimflow::orchestrator
