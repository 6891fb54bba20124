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

#include <string>
#include <vector>

#include "bimflow/nlu/types.hpp"
#include "bimflow/orchestrator/trace.hpp"

namespace bimflow::orchestrator {

struct PlannedStep {
  Step step = Step::Interpret;
  bool skipped = false;
  std::string reason;
};

/// Six entries in framework order with skip flags for `task`. Throws
/// OrchestratorError(ProtocolError) for Unknown.
std::vector<PlannedStep> plan_steps(nlu::TaskClass task, bool check_enabled = true);

const PlannedStep& planned(const std::vector<PlannedStep>& plan, Step step);

}  // namespace bimflow::orchestrator
