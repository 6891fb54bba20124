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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bimflow/compliance/rules.hpp"
#include "bimflow/kernel/types.hpp"

namespace bimflow::orchestrator {

struct StructureOutcome {
  std::optional<kernel::WallDetailSpec> spec;
  std::string error;  // set when spec is empty
};

struct RetryCallbacks {
  // Produces the spec for `attempt` (1-based); feedback holds the failed
  // verdict messages of the previous attempt.
  std::function<StructureOutcome(int attempt, const std::vector<std::string>& feedback)> structure;
  // Applies the spec to the model; kernel errors propagate as exceptions.
  std::function<kernel::ExecutionResult(const kernel::WallDetailSpec&, int attempt)> execute;
  // Absent when the check loop is disabled.
  std::function<compliance::CheckReport(const kernel::WallDetailSpec&, int attempt)> check;
  // Records the verdict of an attempt on the executed entity.
  std::function<void(const kernel::ExecutionResult&, bool compliant)> flag;
};

struct RetryLoopResult {
  enum class Status { Completed, RetryExhausted, StructureFailed, ExecuteFailed };

  Status status = Status::StructureFailed;
  int attempts = 0;
  std::optional<kernel::ExecutionResult> execution;
  std::optional<kernel::WallDetailSpec> spec;
  // Last report; always overall = true when Completed with a check.
  std::optional<compliance::CheckReport> report;
  std::string reason;
};

std::string_view to_string(RetryLoopResult::Status status);

/// Structure -> Execute -> Check until a report passes or `budget` attempts
/// were used. Never returns Completed with a failing report.
RetryLoopResult run_retry_loop(const RetryCallbacks& callbacks, int budget);

}  // namespace bimflow::orchestrator
