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

#include "bimflow/orchestrator/trace.hpp"

#include <algorithm>
#include <map>

namespace bimflow::orchestrator {

std::string_view to_string(Step step) {
  switch (step) {
    case Step::Interpret: return "Interpret";
    case Step::Fill: return "Fill";
    case Step::Match: return "Match";
    case Step::Structure: return "Structure";
    case Step::Execute: return "Execute";
    case Step::Check: return "Check";
  }
  return "?";
}

std::optional<Step> parse_step(std::string_view text) {
  for (auto s : kAllSteps) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::size_t PipelineTrace::executed_count() const {
  std::size_t n = 0;
  for (const auto& r : steps) n += r.skipped ? 0 : 1;
  return n;
}

std::vector<const StepRecord*> PipelineTrace::records(Step step) const {
  std::vector<const StepRecord*> out;
  for (const auto& r : steps) {
    if (r.step == step) out.push_back(&r);
  }
  return out;
}

int PipelineTrace::attempts() const {
  int n = 0;
  for (const auto& r : steps) n = std::max(n, r.attempt);
  return n;
}

bool PipelineTrace::well_formed() const {
  std::map<int, std::vector<Step>> by_attempt;
  for (const auto& r : steps) by_attempt[r.attempt].push_back(r.step);
  for (int a = 1; a <= attempts(); ++a) {
    auto it = by_attempt.find(a);
    if (it == by_attempt.end()) return false;
    if (it->second != std::vector<Step>(kAllSteps.begin(), kAllSteps.end())) return false;
  }
  // Attempts must not interleave.
  int last = 0;
  for (const auto& r : steps) {
    if (r.attempt < last) return false;
    last = r.attempt;
  }
  return true;
}

void to_json(nlohmann::json& j, const StepRecord& record) {
  j = nlohmann::json{{"step", to_string(record.step)},
                     {"attempt", record.attempt},
                     {"skipped", record.skipped},
                     {"duration_ms", record.duration_ms}};
  if (record.skipped) {
    j["skip_reason"] = record.skip_reason;
  } else {
    j["input"] = record.input;
    j["output"] = record.output;
    j["exchanges"] = record.exchanges;
  }
}

void to_json(nlohmann::json& j, const PipelineTrace& trace) {
  j = nlohmann::json{{"session_id", trace.session_id},
                     {"turn", trace.turn},
                     {"utterance", trace.utterance},
                     {"task", nlu::to_string(trace.task)},
                     {"steps", trace.steps},
                     {"outcome", trace.outcome}};
}

}  // namespace bimflow::orchestrator
