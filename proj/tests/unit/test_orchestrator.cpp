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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bimflow/experiment/harness.hpp"
#include "bimflow/llm/mock_backend.hpp"
#include "bimflow/orchestrator/config.hpp"
#include "bimflow/orchestrator/engine.hpp"
#include "bimflow/orchestrator/plan.hpp"
#include "bimflow/orchestrator/retry_loop.hpp"
#include "test_support.hpp"

using namespace bimflow;
using namespace bimflow::orchestrator;
using nlohmann::json;

namespace {

constexpr const char* kCe1 =
    "Propose a wall detail using a reinforced concrete structure and exterior insulation method, ensuring a minimum "
    "thickness of 140 mm.";
constexpr const char* kRotate = "Rotate the model 90 degrees about the Z axis.";

std::vector<Step> executed_steps(const PipelineTrace& trace) {
  std::vector<Step> out;
  for (const auto& s : trace.steps) {
    if (!s.skipped) out.push_back(s.step);
  }
  return out;
}

std::vector<std::string> types_of(const std::vector<Event>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) out.push_back(e.type);
  return out;
}

std::shared_ptr<Engine> experiment_engine(double p, int budget = 5, bool check = true) {
  EngineConfig config;
  config.retry_budget = budget;
  config.check_enabled = check;
  return std::make_shared<Engine>(config, std::make_shared<llm::MockBackend>(experiment::experiment_script(p)));
}

}  // namespace

// ------------------------------------------------------------------ plan

TEST(OrchestratorPlan, SkipsPerTask) {
  auto create = plan_steps(nlu::TaskClass::CreateWallDetail);
  ASSERT_EQ(create.size(), 6u);
  for (const auto& p : create) EXPECT_FALSE(p.skipped);

  auto transform = plan_steps(nlu::TaskClass::SimpleTransform);
  EXPECT_FALSE(planned(transform, Step::Interpret).skipped);
  EXPECT_TRUE(planned(transform, Step::Fill).skipped);
  EXPECT_TRUE(planned(transform, Step::Match).skipped);
  EXPECT_FALSE(planned(transform, Step::Structure).skipped);
  EXPECT_FALSE(planned(transform, Step::Execute).skipped);
  EXPECT_TRUE(planned(transform, Step::Check).skipped);

  auto window = plan_steps(nlu::TaskClass::PlaceWindow);
  EXPECT_TRUE(planned(window, Step::Structure).skipped);
  EXPECT_FALSE(planned(window, Step::Fill).skipped);

  auto unchecked = plan_steps(nlu::TaskClass::ModifyWall, false);
  EXPECT_EQ(planned(unchecked, Step::Check).reason, "check loop disabled");

  try {
    plan_steps(nlu::TaskClass::Unknown);
    FAIL() << "expected a protocol error";
  } catch (const OrchestratorError& e) {
    EXPECT_EQ(e.code(), OrchestratorErrc::ProtocolError);
  }
}

TEST(OrchestratorSteps, NamesRoundTrip) {
  for (auto s : kAllSteps) EXPECT_EQ(parse_step(to_string(s)), s);
  EXPECT_FALSE(parse_step("Dance").has_value());
}

// ------------------------------------------------------------------ retry loop

namespace {

struct FakeLoop {
  int fix_at = 1;  // attempt whose spec passes; 0 = never
  int structured = 0, executed = 0, checked = 0;
  std::vector<bool> flags;
  std::vector<std::vector<std::string>> feedback_seen;

  RetryCallbacks callbacks() {
    RetryCallbacks cb;
    cb.structure = [this](int attempt, const std::vector<std::string>& feedback) {
      ++structured;
      feedback_seen.push_back(feedback);
      const bool good = fix_at != 0 && attempt >= fix_at;
      return StructureOutcome{testkit::concrete_wall("W", good ? 150 : 50), {}};
    };
    cb.execute = [this](const kernel::WallDetailSpec&, int) {
      ++executed;
      kernel::ExecutionResult r;
      r.mutated_ids = {"wt-1"};
      return r;
    };
    cb.check = [this](const kernel::WallDetailSpec& spec, int attempt) {
      ++checked;
      return compliance::run_checks(spec, compliance::make_context("reinforced concrete", std::nullopt),
                                    compliance::default_registry(), attempt);
    };
    cb.flag = [this](const kernel::ExecutionResult&, bool ok) { flags.push_back(ok); };
    return cb;
  }
};

}  // namespace

TEST(OrchestratorRetryLoop, PassesFirstTime) {
  FakeLoop fake;
  auto r = run_retry_loop(fake.callbacks(), 5);
  EXPECT_EQ(r.status, RetryLoopResult::Status::Completed);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(fake.structured, 1);
  EXPECT_EQ(fake.flags, std::vector<bool>{true});
}

TEST(OrchestratorRetryLoop, FixOnThirdAttemptWithFeedback) {
  FakeLoop fake;
  fake.fix_at = 3;
  auto r = run_retry_loop(fake.callbacks(), 5);
  EXPECT_EQ(r.status, RetryLoopResult::Status::Completed);
  EXPECT_EQ(r.attempts, 3);
  EXPECT_TRUE(r.report->overall);
  EXPECT_EQ(fake.flags, (std::vector<bool>{false, false, true}));
  ASSERT_EQ(fake.feedback_seen.size(), 3u);
  EXPECT_TRUE(fake.feedback_seen[0].empty());
  ASSERT_EQ(fake.feedback_seen[1].size(), 1u);
  EXPECT_EQ(fake.feedback_seen[1][0].rfind("min_structural_thickness: ", 0), 0u);
}

TEST(OrchestratorRetryLoop, ExhaustsBudget) {
  FakeLoop fake;
  fake.fix_at = 0;
  auto r = run_retry_loop(fake.callbacks(), 4);
  EXPECT_EQ(r.status, RetryLoopResult::Status::RetryExhausted);
  EXPECT_EQ(r.attempts, 4);
  EXPECT_EQ(fake.structured, 4);
  EXPECT_FALSE(r.report->overall);
  EXPECT_THROW(run_retry_loop(fake.callbacks(), 0), std::invalid_argument);
}

TEST(OrchestratorRetryLoop, NoCheckCompletesOnce) {
  FakeLoop fake;
  fake.fix_at = 0;
  auto cb = fake.callbacks();
  cb.check = nullptr;
  auto r = run_retry_loop(cb, 5);
  EXPECT_EQ(r.status, RetryLoopResult::Status::Completed);
  EXPECT_EQ(r.attempts, 1);
  EXPECT_FALSE(r.report.has_value());
}

TEST(OrchestratorRetryLoop, StructureAndExecuteFailuresStop) {
  FakeLoop fake;
  auto cb = fake.callbacks();
  cb.structure = [](int, const auto&) { return StructureOutcome{std::nullopt, "bad payload"}; };
  auto r = run_retry_loop(cb, 5);
  EXPECT_EQ(r.status, RetryLoopResult::Status::StructureFailed);
  EXPECT_EQ(r.reason, "bad payload");

  cb = fake.callbacks();
  cb.execute = [](const kernel::WallDetailSpec&, int) -> kernel::ExecutionResult {
    throw kernel::KernelError(kernel::KernelErrc::DuplicateName, "taken");
  };
  r = run_retry_loop(cb, 5);
  EXPECT_EQ(r.status, RetryLoopResult::Status::ExecuteFailed);
  EXPECT_EQ(r.attempts, 1);
}

// ------------------------------------------------------------------ events

TEST(OrchestratorEvents, SequenceNumbersAndClose) {
  EventStream stream("s-x");
  std::vector<std::uint64_t> seen;
  auto id = stream.subscribe([&](const Event& e) { seen.push_back(e.seq); });
  stream.publish("a", 1);
  stream.publish("b", 1);
  stream.unsubscribe(id);
  stream.publish("c", 1);
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(stream.history().size(), 3u);
  stream.close();
  EXPECT_TRUE(stream.closed());
  EXPECT_THROW(stream.subscribe([](const Event&) {}), OrchestratorError);
}

TEST(OrchestratorEvents, Ce1TurnEventOrder) {
  Engine engine(EngineConfig{});
  auto session = engine.create_session();
  std::vector<Event> a, b;
  session->events().subscribe([&](const Event& e) { a.push_back(e); });
  session->events().subscribe([&](const Event& e) { b.push_back(e); });
  auto outcome = session->handle_utterance(kCe1);
  ASSERT_EQ(outcome.kind, TurnOutcome::Kind::Completed) << outcome.message;

  EXPECT_EQ(types_of(a), types_of(b));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].seq, i + 1);
    EXPECT_EQ(a[i].seq, b[i].seq);
  }
  const auto types = types_of(a);
  EXPECT_EQ(types.front(), "turn_started");
  EXPECT_EQ(types.back(), "turn_completed");
  EXPECT_EQ(std::count(types.begin(), types.end(), "step_completed"), 6);
  EXPECT_EQ(std::count(types.begin(), types.end(), "step_started"), 6);
  EXPECT_EQ(std::count(types.begin(), types.end(), "model_updated"), 1);
  EXPECT_EQ(std::count(types.begin(), types.end(), "check_report"), 1);
  std::vector<std::string> completed;
  for (const auto& e : a) {
    if (e.type == "step_completed") completed.push_back(e.data["step"]);
  }
  EXPECT_EQ(completed, (std::vector<std::string>{"Interpret", "Fill", "Match", "Structure", "Execute", "Check"}));
}

// ------------------------------------------------------------------ traces

TEST(OrchestratorTrace, GoldenCe1) {
  Engine engine(EngineConfig{});
  auto session = engine.create_session();
  auto outcome = session->handle_utterance(kCe1);
  ASSERT_EQ(outcome.kind, TurnOutcome::Kind::Completed);
  auto trace = session->trace(outcome.turn);
  ASSERT_TRUE(trace.has_value());
  EXPECT_TRUE(trace->well_formed());
  EXPECT_EQ(trace->executed_count(), 6u);
  EXPECT_EQ(executed_steps(*trace), std::vector<Step>(kAllSteps.begin(), kAllSteps.end()));

  const auto golden_path = std::filesystem::path(BIMFLOW_TEST_DIR) / "golden" / "ce1_trace.json";
  const json actual = *trace;
  if (const char* update = std::getenv("BIMFLOW_UPDATE_GOLDEN"); update && std::string(update) == "1") {
    std::ofstream(golden_path) << actual.dump(2) << '\n';
  }
  ASSERT_TRUE(std::filesystem::exists(golden_path)) << "run with BIMFLOW_UPDATE_GOLDEN=1 to create it";
  const auto golden = json::parse(testkit::read_file(golden_path));
  EXPECT_EQ(actual, golden) << actual.dump(2);
}

TEST(OrchestratorTrace, TransformSkipsFillAndCheck) {
  Engine engine(EngineConfig{});
  auto session = engine.create_session();
  auto outcome = session->handle_utterance(kRotate);
  ASSERT_EQ(outcome.kind, TurnOutcome::Kind::Completed) << outcome.message;
  auto trace = session->trace(outcome.turn);
  ASSERT_TRUE(trace);
  EXPECT_EQ(trace->task, nlu::TaskClass::SimpleTransform);
  EXPECT_TRUE(trace->well_formed());
  EXPECT_EQ(executed_steps(*trace), (std::vector<Step>{Step::Interpret, Step::Structure, Step::Execute}));
  EXPECT_TRUE(trace->records(Step::Fill).at(0)->skipped);
  EXPECT_TRUE(trace->records(Step::Check).at(0)->skipped);
  EXPECT_EQ(session->project().orientation.z, 90.0);
}

TEST(OrchestratorTrace, DeterministicAcrossEngines) {
  auto run = [] {
    Engine engine(EngineConfig{});
    auto s = engine.create_session(99);
    auto o = s->handle_utterance(kCe1);
    return json(*s->trace(o.turn)).dump();
  };
  EXPECT_EQ(run(), run());
}

// ------------------------------------------------------------------ dialogue

TEST(OrchestratorDialogue, OffLabelRequestFails) {
  Engine engine(EngineConfig{});
  auto session = engine.create_session();
  auto outcome = session->handle_utterance("What is the weather tomorrow?");
  EXPECT_EQ(outcome.kind, TurnOutcome::Kind::Failed);
  EXPECT_EQ(outcome.reason, "task not recognised");
  auto trace = session->trace(outcome.turn);
  EXPECT_EQ(executed_steps(*trace), std::vector<Step>{Step::Interpret});
  EXPECT_EQ(trace->steps.size(), 6u);
}

TEST(OrchestratorDialogue, MustAskQuestionThenAnswer) {
  testkit::TempDir dir;
  auto schemas = json::parse(testkit::read_file(std::filesystem::path(BIMFLOW_TEST_DIR) / ".." / "core" / "data" /
                                                "slot_schemas.json"));
  for (auto& slot : schemas["tasks"]["CreateWallDetail"]) {
    if (slot["name"] == "min_thickness") slot["required"] = true;
  }
  std::ofstream(dir / "schemas.json") << schemas.dump();
  EngineConfig config;
  config.slot_schemas = dir / "schemas.json";
  Engine engine(config);
  auto session = engine.create_session();
  std::vector<Event> events;
  session->events().subscribe([&](const Event& e) { events.push_back(e); });

  auto first = session->handle_utterance("Create an exterior wall for Alaska.");
  ASSERT_EQ(first.kind, TurnOutcome::Kind::NeedsAnswer) << first.message;
  ASSERT_TRUE(first.question);
  EXPECT_EQ(first.question->slot, "min_thickness");
  EXPECT_EQ(events.back().type, "question_pending");
  EXPECT_THROW(session->handle_utterance("Create another wall"), OrchestratorError);

  auto again = session->answer_question("hello");
  ASSERT_EQ(again.kind, TurnOutcome::Kind::NeedsAnswer);
  EXPECT_EQ(again.question->attempt, 2);

  auto done = session->answer_question("300 mm");
  ASSERT_EQ(done.kind, TurnOutcome::Kind::Completed) << done.message;
  EXPECT_FALSE(session->pending_question());
  EXPECT_TRUE(done.report->overall);
  auto trace = session->trace(done.turn);
  EXPECT_TRUE(trace->records(Step::Interpret).at(0)->skipped);
  EXPECT_EQ(trace->executed_count(), 5u);
  EXPECT_EQ(session->project().wall_types.size(), 1u);
  EXPECT_EQ(session->project().wall_types[0].spec.layers[4].material, "timber");

  try {
    session->answer_question("again");
    FAIL() << "expected a protocol error";
  } catch (const OrchestratorError& e) {
    EXPECT_EQ(e.code(), OrchestratorErrc::ProtocolError);
  }
  EXPECT_EQ(session->history().size(), 6u);
}

TEST(OrchestratorDialogue, ModifyAsksForTargetAndChange) {
  Engine engine(EngineConfig{});
  auto session = engine.create_session();
  ASSERT_EQ(session->handle_utterance(kCe1).kind, TurnOutcome::Kind::Completed);
  const auto type_name = session->project().wall_types.at(0).spec.wall_detail_name;
  auto q1 = session->handle_utterance("Modify the wall please");
  ASSERT_EQ(q1.kind, TurnOutcome::Kind::NeedsAnswer);
  EXPECT_EQ(q1.question->slot, "target_wall_type");
  auto q2 = session->answer_question(type_name);
  ASSERT_EQ(q2.kind, TurnOutcome::Kind::NeedsAnswer);
  EXPECT_EQ(q2.question->slot, "modification");
  auto done = session->answer_question("keep it as is");
  EXPECT_EQ(done.kind, TurnOutcome::Kind::Completed) << done.message;
  EXPECT_EQ(session->project().wall_types.size(), 1u);
}

TEST(OrchestratorDialogue, ClosedSessionRejectsTurns) {
  Engine engine(EngineConfig{});
  auto session = engine.create_session();
  const auto id = session->id();
  EXPECT_EQ(engine.find_session(id), session);
  EXPECT_TRUE(engine.close_session(id));
  EXPECT_FALSE(engine.close_session(id));
  EXPECT_EQ(engine.find_session(id), nullptr);
  EXPECT_THROW(session->handle_utterance(kCe1), OrchestratorError);
}

TEST(OrchestratorDialogue, SessionsAreIsolated) {
  Engine engine(EngineConfig{});
  auto a = engine.create_session();
  auto b = engine.create_session();
  EXPECT_NE(a->id(), b->id());
  std::thread ta([&] { a->handle_utterance(kCe1); });
  std::thread tb([&] { b->handle_utterance(kRotate); });
  ta.join();
  tb.join();
  EXPECT_EQ(a->project().wall_types.size(), 1u);
  EXPECT_EQ(a->project().orientation.z, 0.0);
  EXPECT_TRUE(b->project().wall_types.empty());
  EXPECT_EQ(b->project().orientation.z, 90.0);
  for (const auto& e : a->events().history()) EXPECT_EQ(e.session_id, a->id());
}

// ------------------------------------------------------------------ guarantee

TEST(OrchestratorGuarantee, CompletedImpliesPassingReport) {
  for (double p : {0.0, 0.3, 1.0}) {
    auto engine = experiment_engine(p);
    int completed = 0, failed = 0;
    for (int i = 0; i < 40; ++i) {
      auto s = engine->create_session(derive_seed(11, std::to_string(i)));
      auto o = s->handle_utterance(kCe1);
      if (o.kind == TurnOutcome::Kind::Completed) {
        ++completed;
        ASSERT_TRUE(o.report);
        EXPECT_TRUE(o.report->overall);
        for (const auto& v : o.report->verdicts) EXPECT_TRUE(v.passed) << v.rule_id;
        EXPECT_EQ(s->project().wall_types.at(0).compliance, kernel::ComplianceState::Compliant);
      } else {
        ++failed;
        EXPECT_EQ(o.reason, "RetryExhausted");
        EXPECT_EQ(o.attempts, 5);
        EXPECT_EQ(s->project().wall_types.at(0).compliance, kernel::ComplianceState::NonCompliant);
      }
    }
    if (p == 0.0) {
      EXPECT_EQ(completed, 40);
    } else if (p == 1.0) {
      EXPECT_EQ(failed, 40);
    } else {
      EXPECT_GT(completed, 35);
    }
  }
}

TEST(OrchestratorGuarantee, RetriesReenterAtStructure) {
  auto engine = experiment_engine(1.0, 3);
  auto s = engine->create_session(5);
  auto o = s->handle_utterance(kCe1);
  ASSERT_EQ(o.kind, TurnOutcome::Kind::Failed);
  auto trace = s->trace(o.turn);
  EXPECT_EQ(trace->attempts(), 3);
  EXPECT_TRUE(trace->well_formed());
  EXPECT_EQ(trace->records(Step::Structure).size(), 3u);
  EXPECT_EQ(trace->records(Step::Interpret).size(), 3u);
  EXPECT_TRUE(trace->records(Step::Interpret)[1]->skipped);
  EXPECT_EQ(s->project().wall_types.size(), 1u);
}

TEST(OrchestratorGuarantee, NoCheckKeepsFirstAttempt) {
  auto engine = experiment_engine(1.0, 5, false);
  auto s = engine->create_session(5);
  auto o = s->handle_utterance(kCe1);
  EXPECT_EQ(o.kind, TurnOutcome::Kind::Completed);
  EXPECT_EQ(o.attempts, 1);
  EXPECT_FALSE(o.report);
  EXPECT_TRUE(s->trace(o.turn)->records(Step::Check).at(0)->skipped);
}

// ------------------------------------------------------------------ config

TEST(OrchestratorConfig, ParsesAndRejects) {
  auto cfg = engine_config_from_json(
      json::parse(R"({"backend":"mock","mock_script":"s.json","retry_budget":3,"mode":"split",
                      "server":{"port":9000},"nlu":{"context_turns":2},"models":{"structure":"m2"}})"),
      "/base");
  EXPECT_EQ(cfg.mock_script, std::filesystem::path("/base/s.json"));
  EXPECT_EQ(cfg.retry_budget, 3);
  EXPECT_EQ(cfg.mode, grounding::StructuringMode::Split);
  EXPECT_EQ(cfg.server.port, 9000);
  EXPECT_EQ(cfg.nlu.context_turns, 2u);
  EXPECT_EQ(cfg.step_models.at("structure"), "m2");
  EXPECT_THROW(engine_config_from_json(json::parse(R"({"retry_budgte":3})")), ConfigError);
  EXPECT_THROW(engine_config_from_json(json::parse(R"({"retry_budget":0})")), ConfigError);
  EXPECT_THROW(engine_config_from_json(json::parse(R"({"backend":"cloud"})")), ConfigError);
  EXPECT_THROW(engine_config_from_json(json::parse(R"({"match_threshold":"high"})")), ConfigError);
  EXPECT_THROW(load_engine_config("/nonexistent/config.json"), ConfigError);
}

TEST(OrchestratorConfig, DeriveSeedIsStable) {
  EXPECT_EQ(derive_seed(42, "CE1/1"), derive_seed(42, "CE1/1"));
  EXPECT_NE(derive_seed(42, "CE1/1"), derive_seed(42, "CE1/2"));
  EXPECT_NE(derive_seed(42, "CE1/1"), derive_seed(43, "CE1/1"));
}
