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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bimflow/experiment/prompt_codes.hpp"
#include "bimflow/experiment/results.hpp"
#include "bimflow/kernel/types.hpp"
#include "bimflow/llm/backend.hpp"
#include "bimflow/llm/mock_backend.hpp"
#include "bimflow/orchestrator/config.hpp"
#include "bimflow/orchestrator/session.hpp"

namespace bimflow::experiment {

struct ExperimentOptions {
  std::vector<PromptCode> codes = all_codes();
  int runs = 30;
  std::uint64_t seed = 0;
  bool check_enabled = true;
  int retry_budget = 5;
  int jobs = 1;
  // Keep the records already in <out>/records.csv and run only the rest.
  bool resume = false;
  std::filesystem::path out;
  // Engine tuning; check_enabled and retry_budget above take precedence.
  orchestrator::EngineConfig engine;
  // Called once per finished run in record order.
  std::function<void(const RunRecord&)> on_record;
};

struct ExperimentResult {
  std::vector<RunRecord> records;  // everything in records.csv afterwards
  ResultsTable table;
  int executed = 0;  // runs performed by this invocation
};

/// Bundled experiment script, optionally with a different fault-injection
/// probability on its structuring rule.
llm::MockScript experiment_script(std::optional<double> violation_probability = std::nullopt);

struct Verdicts {
  bool material = false;
  bool thickness = false;
};

/// Scores a stored spec against the requirements of `code`: the structural
/// material rule and the structural thickness rule only.
Verdicts score_spec(const kernel::WallDetailSpec& spec, const PromptCode& code,
                    const orchestrator::EngineResources& resources,
                    const std::vector<kernel::Material>& library);

/// Runs every (code, run) pair in a fresh session with seed
/// derive_seed(seed, "<code>/<run>"). Records stream to <out>/records.csv in
/// canonical order; specs go to <out>/specs, traces to <out>/traces and the
/// table to <out>/summary.md.
ExperimentResult run_experiment(const ExperimentOptions& options, std::shared_ptr<llm::ChatBackend> backend);

/// Recomputes every verdict from the spec files of a finished output
/// directory, ignoring the pass flags stored in records.csv.
ResultsTable rescore(const std::filesystem::path& out, const orchestrator::EngineResources& resources);

}  // namespace bimflow::experiment
