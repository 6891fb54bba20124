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

#include "bimflow/orchestrator/retry_loop.hpp"

#include <stdexcept>

#include "bimflow/kernel/types.hpp"

namespace bimflow::orchestrator {

std::string_view to_string(RetryLoopResult::Status status) {
  switch (status) {
    case RetryLoopResult::Status::Completed: return "Completed";
    case RetryLoopResult::Status::RetryExhausted: return "RetryExhausted";
    case RetryLoopResult::Status::StructureFailed: return "StructureFailed";
    case RetryLoopResult::Status::ExecuteFailed: return "ExecuteFailed";
  }
  return "?";
}

RetryLoopResult run_retry_loop(const RetryCallbacks& callbacks, int budget) {
  if (budget < 1) throw std::invalid_argument("retry budget must be >= 1");
  RetryLoopResult result;
  std::vector<std::string> feedback;
  for (int attempt = 1; attempt <= budget; ++attempt) {
    result.attempts = attempt;
    auto structured = callbacks.structure(attempt, feedback);
    if (!structured.spec) {
      result.status = RetryLoopResult::Status::StructureFailed;
      result.reason = structured.error;
      return result;
    }
    result.spec = structured.spec;
    try {
      result.execution = callbacks.execute(*structured.spec, attempt);
    } catch (const kernel::KernelError& e) {
      result.status = RetryLoopResult::Status::ExecuteFailed;
      result.reason = e.what();
      return result;
    }
    if (!callbacks.check) {
      result.status = RetryLoopResult::Status::Completed;
      return result;
    }
    result.report = callbacks.check(*structured.spec, attempt);
    if (callbacks.flag) callbacks.flag(*result.execution, result.report->overall);
    if (result.report->overall) {
      result.status = RetryLoopResult::Status::Completed;
      return result;
    }
    feedback.clear();
    for (const auto* v : result.report->failed()) {
      if (v->severity == compliance::Severity::Blocking) feedback.push_back(v->rule_id + ": " + v->message);
    }
  }
  result.status = RetryLoopResult::Status::RetryExhausted;
  result.reason = "no compliant wall detail within " + std::to_string(budget) + " attempts";
  return result;
}

}  // namespace bimflow::orchestrator
