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

#include "bimflow/experiment/harness.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bimflow/bundled_data.hpp"
#include "bimflow/compliance/rules.hpp"
#include "bimflow/kernel/materials.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/orchestrator/engine.hpp"

namespace bimflow::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Task {
  PromptCode code;
  int run = 0;
};

std::string run_label(const Task& task, int width) {
  std::ostringstream out;
  out << task.code.text() << '_' << std::setw(width) << std::setfill('0') << task.run;
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ExperimentError("cannot write " + path.string());
  out << text;
}

kernel::WallDetailSpec read_spec(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ExperimentError("cannot read " + path.string());
  return kernel::spec_from_json(json::parse(in));
}

}  // namespace

llm::MockScript experiment_script(std::optional<double> violation_probability) {
  auto script = llm::parse_mock_script(json::parse(bundled::kExperimentScriptJson));
  if (violation_probability) {
    for (auto& rule : script.rules) {
      if (rule.failure && rule.failure->mode == llm::FailureMode::RuleViolation) {
        rule.failure->probability = *violation_probability;
      }
    }
    llm::validate_script(script);
  }
  return script;
}

Verdicts score_spec(const kernel::WallDetailSpec& spec, const PromptCode& code,
                    const orchestrator::EngineResources& resources, const std::vector<kernel::Material>& library) {
  grounding::Vocabulary vocab{library, resources.aliases, resources.config.match_threshold};
  const auto ctx = compliance::make_context(code.material(), code.min_thickness_mm(), resources.rule_params, &vocab);
  Verdicts v;
  v.material = compliance::rule_structural_material(spec, ctx).passed;
  v.thickness = compliance::rule_min_structural_thickness(spec, ctx, resources.rule_params).passed;
  return v;
}

ExperimentResult run_experiment(const ExperimentOptions& options, std::shared_ptr<llm::ChatBackend> backend) {
  if (options.runs < 1) throw ExperimentError("runs must be >= 1");
  if (options.codes.empty()) throw ExperimentError("no prompt codes given");
  if (options.out.empty()) throw ExperimentError("output directory is required");

  auto config = options.engine;
  config.check_enabled = options.check_enabled;
  config.retry_budget = options.retry_budget;
  orchestrator::Engine engine(config, std::move(backend));
  const auto resources = engine.resources();
  const auto library = kernel::seed_materials();

  fs::create_directories(options.out / "specs");
  fs::create_directories(options.out / "traces");
  const fs::path csv_path = options.out / "records.csv";

  std::set<std::pair<std::string, int>> done;
  std::vector<RunRecord> prior;
  if (options.resume && fs::exists(csv_path)) {
    prior = read_records(csv_path);
    for (const auto& r : prior) done.insert({r.code, r.run});
  }
  {
    // Rewrite so a torn trailing line from an interrupted run disappears.
    std::ostringstream text;
    text << csv_header() << '\n';
    for (const auto& r : prior) text << to_csv_row(r) << '\n';
    write_text(csv_path, text.str());
  }

  std::vector<Task> tasks;
  for (const auto& code : options.codes) {
    for (int run = 1; run <= options.runs; ++run) {
      if (done.count({code.text(), run}) == 0) tasks.push_back({code, run});
    }
  }
  const int width = std::max<int>(2, static_cast<int>(std::to_string(options.runs).size()));

  std::ofstream csv(csv_path, std::ios::binary | std::ios::app);
  if (!csv) throw ExperimentError("cannot append to " + csv_path.string());
  std::mutex sink_mutex;
  std::map<std::size_t, RunRecord> reorder;
  std::size_t next_to_write = 0;

  auto emit = [&](std::size_t index, RunRecord record) {
    std::lock_guard lock(sink_mutex);
    reorder.emplace(index, std::move(record));
    while (!reorder.empty() && reorder.begin()->first == next_to_write) {
      const auto& r = reorder.begin()->second;
      csv << to_csv_row(r) << '\n';
      csv.flush();
      if (options.on_record) options.on_record(r);
      reorder.erase(reorder.begin());
      ++next_to_write;
    }
  };

  auto perform = [&](const Task& task) {
    RunRecord record;
    record.code = task.code.text();
    record.run = task.run;
    const std::string label = run_label(task, width);
    auto session = engine.create_session(orchestrator::derive_seed(options.seed, record.code + "/" + std::to_string(task.run)));
    try {
      auto outcome = session->handle_utterance(expand_prompt_code(task.code));
      record.attempts = outcome.attempts;
      if (auto trace = session->trace(outcome.turn)) {
        for (const auto& step : trace->steps) record.duration_ms += step.duration_ms;
        write_text(options.out / "traces" / (label + ".json"), json(*trace).dump(2) + "\n");
      }
      if (outcome.execution && !outcome.execution->mutated_ids.empty()) {
        const auto project = session->project();
        if (const auto* type = project.find_wall_type(outcome.execution->mutated_ids.front())) {
          record.spec_file = "specs/" + label + ".json";
          write_text(options.out / record.spec_file, json(type->spec).dump(2) + "\n");
        }
      }
      record.status = outcome.kind == orchestrator::TurnOutcome::Kind::Completed ? RunStatus::Completed
                                                                                  : RunStatus::Failed;
    } catch (const std::exception&) {
      record.status = RunStatus::Failed;
    }
    if (record.status == RunStatus::Completed && !record.spec_file.empty()) {
      const auto verdicts = score_spec(read_spec(options.out / record.spec_file), task.code, *resources, library);
      record.material_pass = verdicts.material;
      record.thickness_pass = verdicts.thickness;
    }
    engine.close_session(session->id());
    return record;
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr worker_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        emit(i, perform(tasks[i]));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!worker_error) worker_error = std::current_exception();
        next.store(tasks.size());
        return;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  csv.close();
  if (worker_error) std::rethrow_exception(worker_error);

  ExperimentResult result;
  result.records = read_records(csv_path);
  result.table = compute_accuracy(result.records);
  result.executed = static_cast<int>(tasks.size());
  write_text(options.out / "summary.md", render_summary(result.table));
  return result;
}

ResultsTable rescore(const fs::path& out, const orchestrator::EngineResources& resources) {
  auto records = read_records(out / "records.csv");
  const auto library = kernel::seed_materials();
  for (auto& r : records) {
    r.material_pass = false;
    r.thickness_pass = false;
    if (r.status != RunStatus::Completed || r.spec_file.empty()) continue;
    auto code = parse_prompt_code(r.code);
    if (!code) throw ExperimentError("unknown prompt code in records: " + r.code);
    const auto v = score_spec(read_spec(out / r.spec_file), *code, resources, library);
    r.material_pass = v.material;
    r.thickness_pass = v.thickness;
  }
  return compute_accuracy(records);
}

}  // namespace bimflow::experiment
