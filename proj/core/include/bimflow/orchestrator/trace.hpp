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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bimflow/nlu/types.hpp"

namespace bimflow::orchestrator {

enum class Step { Interpret, Fill, Match, Structure, Execute, Check };

inline constexpr std::array<Step, 6> kAllSteps{Step::Interpret, Step::Fill,    Step::Match,
                                               Step::Structure, Step::Execute, Step::Check};

std::string_view to_string(Step step);
std::optional<Step> parse_step(std::string_view text);

struct StepRecord {
  Step step = Step::Interpret;
  int attempt = 1;
  bool skipped = false;
  std::string skip_reason;
  nlohmann::json input;
  nlohmann::json output;
  // Verbatim model traffic issued during the step.
  std::vector<nlohmann::json> exchanges;
  std::int64_t duration_ms = 0;
};

struct PipelineTrace {
  std::string session_id;
  int turn = 0;
  std::string utterance;
  nlu::TaskClass task = nlu::TaskClass::Unknown;
  std::vector<StepRecord> steps;
  std::string outcome;

  std::size_t executed_count() const;
  /// Records of `step` in attempt order.
  std::vector<const StepRecord*> records(Step step) const;
  int attempts() const;
  /// Steps appear in framework order within every attempt, each once.
  bool well_formed() const;
};

void to_json(nlohmann::json& j, const StepRecord& record);
void to_json(nlohmann::json& j, const PipelineTrace& trace);

}  // namespace bimflow::orchestrator
