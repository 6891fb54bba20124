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

#include <chrono>
#include <csignal>
#include <pthread.h>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bimflow/experiment/harness.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/llm/mock_backend.hpp"
#include "bimflow/orchestrator/engine.hpp"
#include "bimflow/server/server.hpp"
#include "bimflow/util/text.hpp"

namespace {

using namespace bimflow;
using nlohmann::json;

orchestrator::EngineConfig base_config(const std::string& config_path, const std::string& mock_script) {
  orchestrator::EngineConfig config;
  if (!config_path.empty()) config = orchestrator::load_engine_config(config_path);
  if (!mock_script.empty()) {
    config.backend = orchestrator::EngineConfig::Backend::Mock;
    config.mock_script = mock_script;
  }
  return config;
}

// ------------------------------------------------------------------ serve

int cmd_serve(const std::string& config_path, const std::string& mock_script, std::optional<int> port,
              const std::string& static_dir) {
  // Block termination signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  auto config = base_config(config_path, mock_script);
  if (port) config.server.port = static_cast<std::uint16_t>(*port);
  if (!static_dir.empty()) config.server.static_dir = static_dir;
  auto engine = std::make_shared<orchestrator::Engine>(config);
  server::Server srv(engine, config.server);
  srv.start();
  std::cout << "bimflow listening on http://" << config.server.host << ':' << srv.port() << " ("
            << (engine->is_mock() ? "mock" : "live") << " backend)" << std::endl;

  int sig = 0;
  sigwait(&set, &sig);
  std::cout << "shutting down" << std::endl;
  srv.stop();
  return 0;
}

// ------------------------------------------------------------------ repl

void print_event(const orchestrator::Event& e) {
  if (e.type == "step_started") {
    std::cout << "  > " << e.data["step"].get<std::string>() << " (attempt " << e.data["attempt"] << ")\n";
  } else if (e.type == "step_skipped") {
    std::cout << "  - " << e.data["step"].get<std::string>() << " skipped: " << e.data["reason"].get<std::string>()
              << '\n';
  } else if (e.type == "check_report") {
    for (const auto& v : e.data["report"]["verdicts"]) {
      std::cout << "    " << (v["passed"].get<bool>() ? "PASS " : "FAIL ") << v["rule_id"].get<std::string>() << ": "
                << v["message"].get<std::string>() << '\n';
    }
  }
}

int cmd_repl(const std::string& config_path, const std::string& mock_script, bool quiet) {
  auto config = base_config(config_path, mock_script);
  orchestrator::Engine engine(config);
  auto session = engine.create_session();
  if (!quiet) session->events().subscribe(print_event);
  std::cout << "bimflow " << (engine.is_mock() ? "(mock backend)" : "(live backend)")
            << ". Type a request; :project, :trace <n>, :history, :quit.\n";
  std::string line;
  while (std::cout << (session->pending_question() ? "answer> " : "you> ") << std::flush, std::getline(std::cin, line)) {
    const auto text = std::string(util::trim(line));
    if (text.empty()) continue;
    if (text == ":quit" || text == ":q") break;
    if (text == ":project") {
      std::cout << json(session->project()).dump(2) << '\n';
      continue;
    }
    if (text == ":history") {
      std::cout << json(session->history()).dump(2) << '\n';
      continue;
    }
    if (text.rfind(":trace", 0) == 0) {
      auto n = util::parse_number(text.substr(6));
      auto trace = n ? session->trace(static_cast<int>(*n)) : std::nullopt;
      std::cout << (trace ? json(*trace).dump(2) : std::string("no such turn")) << '\n';
      continue;
    }
    try {
      auto outcome = session->pending_question() ? session->answer_question(text) : session->handle_utterance(text);
      std::cout << "bimflow: " << outcome.message << '\n';
    } catch (const std::exception& e) {
      std::cout << "error: " << e.what() << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------------------------ run-experiment

struct ExperimentArgs {
  std::string codes = "CE1,CE2,CI1,CI2,TE1,TE2,TI1,TI2";
  int runs = 30;
  std::string backend = "mock";
  std::uint64_t seed = 42;
  bool no_check = false;
  int jobs = 1;
  bool resume = false;
  std::string out;
  bool confirm_live = false;
  std::optional<double> violation_p;
  int retry_budget = 5;
  std::string config;
  std::string mock_script;
  bool quiet = false;
};

int cmd_run_experiment(const ExperimentArgs& a) {
  experiment::ExperimentOptions options;
  options.codes = experiment::parse_code_list(a.codes);
  options.runs = a.runs;
  options.seed = a.seed;
  options.check_enabled = !a.no_check;
  options.retry_budget = a.retry_budget;
  options.jobs = a.jobs;
  options.resume = a.resume;
  options.out = a.out;
  options.engine = base_config(a.config, {});

  std::shared_ptr<llm::ChatBackend> backend;
  if (a.backend == "live") {
    const int total = static_cast<int>(options.codes.size()) * options.runs;
    if (!a.confirm_live) {
      std::cerr << "refusing to run " << total << " live sessions (at least " << total * 4
                << " model calls) without --confirm-live\n";
      return 2;
    }
    options.engine.backend = orchestrator::EngineConfig::Backend::Live;
    backend = orchestrator::make_backend(options.engine);
  } else {
    auto script = a.mock_script.empty() ? experiment::experiment_script(a.violation_p)
                                        : llm::load_mock_script(a.mock_script);
    backend = std::make_shared<llm::MockBackend>(std::move(script));
  }
  if (!a.quiet) {
    options.on_record = [](const experiment::RunRecord& r) {
      std::cerr << r.code << " #" << r.run << ": " << experiment::to_string(r.status)
                << " material=" << (r.material_pass ? "pass" : "fail")
                << " thickness=" << (r.thickness_pass ? "pass" : "fail") << " attempts=" << r.attempts << '\n';
    };
  }

  const auto started = std::chrono::steady_clock::now();
  auto result = experiment::run_experiment(options, backend);
  const auto elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
  std::cout << experiment::render_summary(result.table);
  std::cout << "\nExecuted " << result.executed << " runs in " << elapsed << " ms; output in " << a.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bimflow: natural-language wall detailing on an embedded building model"};
  app.require_subcommand(1);

  std::string config_path, mock_script, static_dir;
  std::optional<int> port;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP/WebSocket API");
  serve->add_option("--config", config_path, "Engine configuration JSON")->check(CLI::ExistingFile);
  serve->add_option("--mock-script", mock_script, "Mock backend script")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "Listening port (overrides config)");
  serve->add_option("--static-dir", static_dir, "Directory of console files")->check(CLI::ExistingDirectory);

  bool quiet = false;
  auto* repl = app.add_subcommand("repl", "Interactive text dialogue on stdin");
  repl->add_option("--config", config_path, "Engine configuration JSON")->check(CLI::ExistingFile);
  repl->add_option("--mock-script", mock_script, "Mock backend script")->check(CLI::ExistingFile);
  repl->add_flag("--quiet", quiet, "Hide the step ticker");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("run-experiment", "Run the prompt-code experiment");
  exp->add_option("--codes", ea.codes, "Comma-separated prompt codes");
  exp->add_option("--runs", ea.runs, "Runs per code")->check(CLI::PositiveNumber);
  exp->add_option("--backend", ea.backend, "mock or live")->check(CLI::IsMember({"mock", "live"}));
  exp->add_option("--seed", ea.seed, "Base seed");
  exp->add_flag("--no-check", ea.no_check, "Disable the check-and-retry loop");
  exp->add_option("--jobs", ea.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  exp->add_flag("--resume", ea.resume, "Keep existing records and run the rest");
  exp->add_option("--out", ea.out, "Output directory")->required();
  exp->add_flag("--confirm-live", ea.confirm_live, "Allow paid live-model runs");
  exp->add_option("--violation-p", ea.violation_p, "Mock fault probability on structuring")
      ->check(CLI::Range(0.0, 1.0));
  exp->add_option("--retry-budget", ea.retry_budget, "Structure-execute-check attempts")->check(CLI::PositiveNumber);
  exp->add_option("--config", ea.config, "Engine configuration JSON")->check(CLI::ExistingFile);
  exp->add_option("--mock-script", ea.mock_script, "Mock script instead of the bundled one")
      ->check(CLI::ExistingFile);
  exp->add_flag("--quiet", ea.quiet, "Do not print per-run progress");

  CLI11_PARSE(app, argc, argv);
  try {
    if (serve->parsed()) return cmd_serve(config_path, mock_script, port, static_dir);
    if (repl->parsed()) return cmd_repl(config_path, mock_script, quiet);
    if (exp->parsed()) return cmd_run_experiment(ea);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
