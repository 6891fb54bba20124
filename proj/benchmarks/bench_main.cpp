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

#include <benchmark/benchmark.h>

#include <nlohmann/json.hpp>

#include "bimflow/compliance/rules.hpp"
#include "bimflow/experiment/harness.hpp"
#include "bimflow/grounding/matcher.hpp"
#include "bimflow/grounding/validator.hpp"
#include "bimflow/kernel/materials.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/llm/mock_backend.hpp"
#include "bimflow/orchestrator/engine.hpp"

using namespace bimflow;

namespace {

kernel::WallDetailSpec sample_spec() {
  using kernel::LayerFunction;
  return {"Bench Wall",
          {{"cement render", LayerFunction::Finish, 0.72, 20},
           {"mineral wool", LayerFunction::Insulation, 0.035, 100},
           {"reinforced concrete", LayerFunction::Structure, 2.3, 140},
           {"gypsum wallboard", LayerFunction::Finish, 0.25, 12.5}}};
}

void BM_Similarity(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(grounding::similarity("cross laminated timber panel", "cross-laminated timber"));
  }
}
BENCHMARK(BM_Similarity);

void BM_MatchTerm(benchmark::State& state) {
  const auto library = kernel::seed_materials();
  const auto& aliases = grounding::default_alias_table();
  const char* terms[] = {"reinforced concrete", "Rock Wool", "gypsum board", "mithril mesh"};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grounding::match_term(terms[i++ % 4], library, aliases));
  }
}
BENCHMARK(BM_MatchTerm);

void BM_ValidatePayload(benchmark::State& state) {
  const std::string raw = "```json\n" + nlohmann::json(sample_spec()).dump() + "\n```";
  for (auto _ : state) benchmark::DoNotOptimize(grounding::validate_payload(raw));
}
BENCHMARK(BM_ValidatePayload);

void BM_RunChecks(benchmark::State& state) {
  const auto spec = sample_spec();
  const grounding::Vocabulary vocab{kernel::seed_materials(), grounding::default_alias_table(),
                                    grounding::kDefaultThreshold};
  const auto ctx = compliance::make_context("reinforced concrete", 140.0, compliance::default_rule_params(), &vocab);
  const auto registry = compliance::default_registry();
  for (auto _ : state) benchmark::DoNotOptimize(compliance::run_checks(spec, ctx, registry));
}
BENCHMARK(BM_RunChecks);

void BM_PipelineTurn(benchmark::State& state) {
  orchestrator::Engine engine(orchestrator::EngineConfig{},
                              std::make_shared<llm::MockBackend>(experiment::experiment_script(0.3)));
  const std::string prompt =
      "Propose a wall detail using a reinforced concrete structure and exterior insulation method, ensuring a "
      "minimum thickness of 140 mm.";
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto session = engine.create_session(seed++);
    benchmark::DoNotOptimize(session->handle_utterance(prompt));
    engine.close_session(session->id());
  }
}
BENCHMARK(BM_PipelineTurn)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
