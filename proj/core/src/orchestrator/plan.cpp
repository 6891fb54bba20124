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

#include "bimflow/orchestrator/plan.hpp"

#include "bimflow/orchestrator/events.hpp"

namespace bimflow::orchestrator {

std::vector<PlannedStep> plan_steps(nlu::TaskClass task, bool check_enabled) {
  using nlu::TaskClass;
  std::vector<PlannedStep> plan;
  for (auto s : kAllSteps) plan.push_back({s, false, {}});
  auto skip = [&](Step s, std::string reason) {
    auto& p = plan[static_cast<std::size_t>(s)];
    p.skipped = true;
    p.reason = std::move(reason);
  };
  switch (task) {
    case TaskClass::CreateWallDetail:
    case TaskClass::ModifyWall:
      break;
    case TaskClass::SimpleTransform:
      skip(Step::Fill, "simple transform needs no missing-information completion");
      skip(Step::Match, "no library terms to match");
      skip(Step::Check, "simple transform has no compliance requirements");
      break;
    case TaskClass::PlaceWindow:
      skip(Step::Match, "no library terms to match");
      skip(Step::Structure, "window placement takes no structured wall detail");
      skip(Step::Check, "no compliance rules for window placement");
      break;
    case TaskClass::DeleteColumn:
      skip(Step::Match, "no library terms to match");
      skip(Step::Structure, "column deletion takes no structured payload");
      skip(Step::Check, "no compliance rules for deletion");
      break;
    case TaskClass::Unknown:
      throw OrchestratorError(OrchestratorErrc::ProtocolError, "no plan for an Unknown task");
  }
  if (!check_enabled && !plan[static_cast<std::size_t>(Step::Check)].skipped) {
    skip(Step::Check, "check loop disabled");
  }
  return plan;
}

const PlannedStep& planned(const std::vector<PlannedStep>& plan, Step step) {
  return plan.at(static_cast<std::size_t>(step));
}

}  // namespace bimflow::orchestrator
