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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bimflow/compliance/rules.hpp"
#include "bimflow/experiment/harness.hpp"
#include "bimflow/experiment/prompt_codes.hpp"
#include "bimflow/grounding/matcher.hpp"
#include "bimflow/grounding/normalize.hpp"
#include "bimflow/grounding/validator.hpp"
#include "bimflow/kernel/kernel.hpp"
#include "bimflow/kernel/materials.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/llm/mock_backend.hpp"
#include "bimflow/orchestrator/engine.hpp"
#include "oracles.hpp"
#include "payloads.hpp"
#include "test_support.hpp"

using namespace bimflow;
using nlohmann::json;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> notes;

  void expect(bool condition, const std::string& what) {
    if (!condition) passed = false;
    notes.push_back(std::string(condition ? "ok: " : "FAILED: ") + what);
  }
};

std::string num(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

experiment::ExperimentResult run_grid(const std::filesystem::path& out, bool check) {
  experiment::ExperimentOptions o;
  o.runs = 30;
  o.seed = 42;
  o.retry_budget = 5;
  o.check_enabled = check;
  o.out = out;
  return experiment::run_experiment(o, std::make_shared<llm::MockBackend>(experiment::experiment_script(0.3)));
}

// ------------------------------------------------------------------ 1

Outcome framework_guarantee(const std::filesystem::path& out) {
  Outcome r;
  const auto start = std::chrono::steady_clock::now();
  const auto checked = run_grid(out, true);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& t = checked.table;
  r.expect(t.total == 240, "records: " + std::to_string(t.total) + " of 240");
  r.expect(t.completed == 240, "Completed: " + std::to_string(t.completed) + " of 240");
  const auto material = experiment::format_percent(t.material.pass, t.material.total);
  const auto thickness = experiment::format_percent(t.thickness.pass, t.thickness.total);
  r.expect(material == "100.00%", "structural material accuracy " + material);
  r.expect(thickness == "100.00%", "structural thickness accuracy " + thickness);
  for (const auto& rec : checked.records) {
    if (rec.status != experiment::RunStatus::Completed) {
      r.notes.push_back("  not completed: " + rec.code + " run " + std::to_string(rec.run) + " after " +
                        std::to_string(rec.attempts) + " attempts");
    }
    if (rec.status == experiment::RunStatus::Completed && !(rec.material_pass && rec.thickness_pass)) {
      r.expect(false, "completed run " + rec.code + "/" + std::to_string(rec.run) + " fails a criterion");
    }
  }
  int completed_both = 0;
  for (const auto& rec : checked.records) {
    if (rec.status == experiment::RunStatus::Completed && rec.material_pass && rec.thickness_pass) ++completed_both;
  }
  if (t.completed > 0) {
    r.notes.push_back("  both criteria over Completed runs: " + experiment::format_percent(completed_both, t.completed));
  }
  r.expect(seconds < 10.0, "runtime " + num(seconds) + " s");

  testkit::TempDir unchecked_dir("bimflow-accept-nocheck");
  const auto unchecked = run_grid(unchecked_dir.path(), false);
  int both = 0;
  for (const auto& rec : unchecked.records) both += (rec.material_pass && rec.thickness_pass) ? 1 : 0;
  const double rate = 100.0 * both / static_cast<double>(unchecked.records.size());
  r.expect(rate >= 60.0 && rate <= 80.0,
           "first-attempt pass rate without checks " + experiment::format_percent(both, 240) + " in [60%, 80%]");
  return r;
}

// ------------------------------------------------------------------ 2

Outcome prompt_fidelity() {
  Outcome r;
  auto code = [](const char* c) { return *experiment::parse_prompt_code(c); };
  const auto ce1 = experiment::expand_prompt_code(code("CE1"));
  r.expect(ce1 ==
               "Propose a wall detail using a reinforced concrete structure and exterior insulation method, ensuring "
               "a minimum thickness of 140 mm.",
           "CE1 expansion: " + ce1);
  const auto ti2 = experiment::expand_prompt_code(code("TI2"));
  r.expect(ti2 ==
               "Propose a wall detail using a timber structure and interior insulation method, ensuring a minimum "
               "thickness of 184 mm.",
           "TI2 expansion: " + ti2);
  r.expect(code("CE1").min_thickness_mm() == 140.0 && code("CI1").min_thickness_mm() == 140.0, "C1 -> 140");
  r.expect(code("CE2").min_thickness_mm() == 190.0 && code("CI2").min_thickness_mm() == 190.0, "C2 -> 190");
  r.expect(code("TE1").min_thickness_mm() == 140.0 && code("TI1").min_thickness_mm() == 140.0, "T1 -> 140");
  r.expect(code("TE2").min_thickness_mm() == 184.0 && code("TI2").min_thickness_mm() == 184.0, "T2 -> 184");
  r.expect(experiment::all_codes().size() == 8, "8 prompt codes");
  return r;
}

// ------------------------------------------------------------------ 3

Outcome check_rule_boundaries() {
  Outcome r;
  using kernel::LayerFunction;
  auto passes = [](const std::string& material, double t) {
    kernel::WallDetailSpec spec{"W", {testkit::layer("cement render", LayerFunction::Finish, 20),
                                      testkit::layer(material, LayerFunction::Structure, t)}};
    return compliance::rule_min_structural_thickness(spec, compliance::make_context(material, std::nullopt)).passed;
  };
  struct Case {
    const char* material;
    double thickness;
    bool expected;
  };
  for (const auto& c : {Case{"reinforced concrete", 100.0, true}, Case{"reinforced concrete", 99.999, false},
                        Case{"timber", 140.0, true}, Case{"timber", 190.0, true}, Case{"timber", 139.9, false},
                        Case{"timber", 190.1, false}}) {
    const bool got = passes(c.material, c.thickness);
    r.expect(got == c.expected, std::string(c.material) + " " + num(c.thickness) + " mm " +
                                    (got ? "passes" : "fails"));
  }

  const auto matrix = testkit::load_fixture_json("material_matrix.json");
  const grounding::Vocabulary vocab{kernel::seed_materials(), grounding::default_alias_table(),
                                    grounding::kDefaultThreshold};
  int agree = 0;
  for (const auto& c : matrix["cases"]) {
    kernel::WallDetailSpec spec{"W", {}};
    for (const auto& l : c["layers"]) {
      spec.layers.push_back(testkit::layer(l[0].get<std::string>(),
                                           *kernel::parse_layer_function(l[1].get<std::string>()), 150));
    }
    const auto ctx = compliance::make_context(c["requested"].get<std::string>(), std::nullopt,
                                              compliance::default_rule_params(),
                                              c["vocabulary"].get<bool>() ? &vocab : nullptr);
    if (compliance::rule_structural_material(spec, ctx).passed == c["passed"].get<bool>()) {
      ++agree;
    } else {
      r.notes.push_back("  material case " + c["id"].get<std::string>() + " disagrees");
    }
  }
  r.expect(matrix["cases"].size() == 12 && agree == 12,
           "material matrix " + std::to_string(agree) + "/" + std::to_string(matrix["cases"].size()));
  return r;
}

// ------------------------------------------------------------------ 4

Outcome validator_corpus() {
  Outcome r;
  const auto corpus = testkit::load_fixture_json("validator_corpus.json");
  int exact = 0;
  for (const auto& c : corpus["cases"]) {
    const auto payload = grounding::validate_payload(c["raw"].get<std::string>());
    std::vector<std::pair<std::string, std::string>> got, want;
    for (const auto& v : payload.violations) got.emplace_back(std::string(grounding::to_string(v.code)), v.path);
    for (const auto& v : c["violations"]) want.emplace_back(v["code"], v["path"]);
    if (got == want && payload.parsed.has_value() == want.empty()) {
      ++exact;
    } else {
      r.notes.push_back("  case " + c["id"].get<std::string>() + " misclassified");
    }
  }
  r.expect(corpus["cases"].size() == 20 && exact == 20,
           "exact classifications " + std::to_string(exact) + "/" + std::to_string(corpus["cases"].size()));
  return r;
}

// ------------------------------------------------------------------ 5

Outcome matcher_oracle() {
  Outcome r;
  const auto fixture = testkit::load_fixture_json("terms50.json");
  const auto library = kernel::seed_materials();
  const double threshold = fixture["threshold"].get<double>();
  int agree = 0;
  double max_delta = 0.0;
  for (const auto& e : fixture["terms"]) {
    const auto term = e["term"].get<std::string>();
    const auto got = grounding::match_term(term, library, grounding::default_alias_table(), threshold);
    bool ok = grounding::to_string(got.method) == e["method"].get<std::string>();
    ok = ok && (e["match"].is_null() ? !got.matched : got.matched && got.matched->name == e["match"]);
    if (got.method == grounding::MatchMethod::Fuzzy || got.method == grounding::MatchMethod::None) {
      const auto oracle = testkit::oracle_best_fuzzy(grounding::normalize_term(term), library);
      const double delta = std::abs(got.score - oracle.score);
      max_delta = std::max(max_delta, delta);
      ok = ok && delta == 0.0 && (oracle.score >= threshold) == (got.method == grounding::MatchMethod::Fuzzy);
    }
    if (ok) {
      ++agree;
    } else {
      r.notes.push_back("  term '" + term + "' disagrees");
    }
  }
  r.expect(fixture["terms"].size() == 50 && agree == 50,
           "oracle agreement " + std::to_string(agree) + "/50, max |delta score| " + num(max_delta));
  const double s = grounding::similarity("gypsum board", "gypsum wallboard");
  r.expect(s == 0.75, "similarity(gypsum board, gypsum wallboard) = " + num(s));
  r.expect(testkit::oracle_similarity("gypsum board", "gypsum wallboard") == 0.75, "oracle similarity = 0.75");
  return r;
}

// ------------------------------------------------------------------ 6

Outcome validator_kernel_agreement() {
  Outcome r;
  testkit::Rng rng(4242);
  const auto seeded = kernel::make_seeded_project();
  int disagreements = 0, accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto raw = testkit::random_payload(rng, seeded.material_library);
    const bool v = grounding::validate_payload(raw).ok();
    if (v != testkit::kernel_accepts(raw, seeded)) ++disagreements;
    accepted += v ? 1 : 0;
  }
  r.expect(disagreements == 0, std::to_string(disagreements) + " disagreements over 1000 payloads (" +
                                   std::to_string(accepted) + " valid)");
  return r;
}

// ------------------------------------------------------------------ 7

Outcome determinism(const std::filesystem::path& first_run) {
  Outcome r;
  testkit::TempDir second("bimflow-accept-repeat");
  run_grid(second.path(), true);
  const auto a = testkit::read_file(first_run / "records.csv");
  const auto b = testkit::read_file(second / "records.csv");
  r.expect(!a.empty() && a == b, "records.csv byte-identical across two runs (" + std::to_string(a.size()) + " bytes)");

  orchestrator::Engine engine(orchestrator::EngineConfig{});
  auto session = engine.create_session();
  auto ce1 = session->handle_utterance(experiment::expand_prompt_code(*experiment::parse_prompt_code("CE1")));
  auto trace = session->trace(ce1.turn);
  const auto golden =
      json::parse(testkit::read_file(std::filesystem::path(BIMFLOW_TEST_DIR) / "golden" / "ce1_trace.json"));
  r.expect(trace && trace->executed_count() == 6, "CE1 trace executes " +
                                                      std::to_string(trace ? trace->executed_count() : 0) + " steps");
  r.expect(trace && json(*trace) == golden, "CE1 trace equals the golden trace");

  auto rotate = session->handle_utterance("Rotate the model 90 degrees about the Z axis.");
  auto rt = session->trace(rotate.turn);
  bool fill_skipped = false, check_skipped = false;
  if (rt) {
    for (const auto& s : rt->steps) {
      if (s.step == orchestrator::Step::Fill) fill_skipped = s.skipped;
      if (s.step == orchestrator::Step::Check) check_skipped = s.skipped;
    }
  }
  r.expect(rt && rt->task == nlu::TaskClass::SimpleTransform && fill_skipped && check_skipped,
           "transform trace skips Fill and Check");
  return r;
}

// ------------------------------------------------------------------ 8

Outcome kernel_round_trip() {
  Outcome r;
  testkit::TempDir dir("bimflow-accept-kernel");
  testkit::Rng rng(20240611);
  int round_trips = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = testkit::random_project(rng);
    const auto path = dir / ("p" + std::to_string(i) + ".json");
    kernel::save_project(p, path);
    if (kernel::load_project(path) == p) ++round_trips;
  }
  r.expect(round_trips == 100, std::to_string(round_trips) + "/100 projects round-trip");

  testkit::Rng ops(777);
  int intact = 0, atomic_failures = 0;
  for (int seq = 0; seq < 1000; ++seq) {
    auto p = kernel::make_seeded_project();
    bool ok = true;
    const int length = std::uniform_int_distribution<int>(5, 30)(ops);
    for (int k = 0; k < length; ++k) {
      const auto before = p;
      bool threw = false;
      testkit::random_operation(ops, p, threw);
      if (threw && !(p == before)) {
        ok = false;
        ++atomic_failures;
      }
      if (!kernel::integrity_violations(p).empty()) ok = false;
    }
    intact += ok ? 1 : 0;
  }
  r.expect(intact == 1000, std::to_string(intact) + "/1000 operation sequences keep integrity (" +
                               std::to_string(atomic_failures) + " non-atomic failures)");
  return r;
}

}  // namespace

int main() {
  testkit::TempDir grid("bimflow-accept-grid");
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"framework guarantee", [&] { return framework_guarantee(grid.path()); }},
      {"prompt fidelity", prompt_fidelity},
      {"check-rule boundaries", check_rule_boundaries},
      {"validator corpus", validator_corpus},
      {"matcher oracle", matcher_oracle},
      {"validator/kernel agreement", validator_kernel_agreement},
      {"determinism", [&] { return determinism(grid.path()); }},
      {"kernel round-trip", kernel_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.passed ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].name << '\n';
    for (const auto& n : o.notes) std::cout << "        " << n << '\n';
    failed += o.passed ? 0 : 1;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
