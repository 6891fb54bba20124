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

#include <gtest/gtest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

#include "bimflow/compliance/rules.hpp"
#include "bimflow/kernel/materials.hpp"
#include "test_support.hpp"

using namespace bimflow;
using namespace bimflow::compliance;
using kernel::LayerFunction;
using testkit::layer;
using nlohmann::json;

namespace {

kernel::WallDetailSpec structure_only(const std::string& material, double thickness) {
  return {"W", {layer("cement render", LayerFunction::Finish, 20), layer(material, LayerFunction::Structure, thickness),
                layer("gypsum wallboard", LayerFunction::Finish, 12.5)}};
}

bool thickness_passes(const std::string& material, double thickness, const RuleParams& params = default_rule_params()) {
  auto ctx = make_context(material, std::nullopt, params);
  return rule_min_structural_thickness(structure_only(material, thickness), ctx, params).passed;
}

grounding::Vocabulary seed_vocabulary() {
  return {kernel::seed_materials(), grounding::default_alias_table(), grounding::kDefaultThreshold};
}

}  // namespace

TEST(ComplianceParams, BundledDefaults) {
  const auto& p = default_rule_params();
  EXPECT_EQ(p.rc_min_thickness, 100.0);
  EXPECT_EQ(p.timber_min_thickness, 140.0);
  EXPECT_EQ(p.timber_max_thickness, 190.0);
  EXPECT_FALSE(p.strict_rc_threshold);
  EXPECT_EQ(family_of("Reinforced Concrete"), StructuralFamily::ReinforcedConcrete);
  EXPECT_EQ(family_of("cross laminated timber"), StructuralFamily::Timber);
  EXPECT_EQ(family_of("structural steel"), StructuralFamily::Other);
}

TEST(ComplianceParams, OverlayAndErrors) {
  auto p = rule_params_from_json(json::parse(R"({"families":{"Timber":{"max_thickness":250}},
                                                 "family_map":{"Glulam":"Timber"}})"));
  EXPECT_EQ(p.timber_max_thickness, 250.0);
  EXPECT_EQ(p.timber_min_thickness, 140.0);
  EXPECT_EQ(family_of("glulam", p), StructuralFamily::Timber);
  EXPECT_THROW(rule_params_from_json(json::parse(R"({"family_map":{"x":"Brick"}})")), std::invalid_argument);
  EXPECT_THROW(rule_params_from_json(json::parse(R"({"families":{"Timber":{"min_thickness":300}}})")),
               std::invalid_argument);
  EXPECT_THROW(rule_params_from_json(json::parse(R"({"strict_rc_threshold":"yes"})")), std::invalid_argument);
}

TEST(ComplianceThickness, ConcreteBoundary) {
  EXPECT_TRUE(thickness_passes("reinforced concrete", 100.0));
  EXPECT_FALSE(thickness_passes("reinforced concrete", 99.999));
  EXPECT_FALSE(thickness_passes("reinforced concrete", 99.999999));
  EXPECT_TRUE(thickness_passes("reinforced concrete", 190.0));
  EXPECT_FALSE(thickness_passes("reinforced concrete", 90.0));
  EXPECT_TRUE(thickness_passes("reinforced concrete", 1000.0));
}

TEST(ComplianceThickness, TimberBand) {
  EXPECT_TRUE(thickness_passes("timber", 140.0));
  EXPECT_TRUE(thickness_passes("timber", 190.0));
  EXPECT_TRUE(thickness_passes("timber", 165.0));
  EXPECT_FALSE(thickness_passes("timber", 139.9));
  EXPECT_FALSE(thickness_passes("timber", 190.1));
  EXPECT_FALSE(thickness_passes("timber", 200.0));
}

TEST(ComplianceThickness, StrictConcreteThresholdExcludesBound) {
  auto p = default_rule_params();
  p.strict_rc_threshold = true;
  EXPECT_FALSE(thickness_passes("reinforced concrete", 100.0, p));
  EXPECT_TRUE(thickness_passes("reinforced concrete", 100.001, p));
}

TEST(ComplianceThickness, StructureLayersAreSummed) {
  kernel::WallDetailSpec spec{"W", {layer("timber", LayerFunction::Structure, 90),
                                    layer("mineral wool", LayerFunction::Insulation, 100),
                                    layer("timber", LayerFunction::Structure, 60)}};
  auto v = rule_min_structural_thickness(spec, make_context("timber", std::nullopt));
  EXPECT_EQ(v.measured, 150.0);
  EXPECT_TRUE(v.passed);
}

TEST(ComplianceThickness, SummationNoiseWithinSlack) {
  kernel::WallDetailSpec spec{"W", {}};
  for (int i = 0; i < 10; ++i) spec.layers.push_back(layer("reinforced concrete", LayerFunction::Structure, 10.0));
  auto v = rule_min_structural_thickness(spec, make_context("reinforced concrete", std::nullopt));
  EXPECT_TRUE(v.passed);
}

TEST(ComplianceThickness, OtherFamilyIsAdvisory) {
  auto v = rule_min_structural_thickness(structure_only("structural steel", 5), make_context("structural steel", 140.0));
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.severity, Severity::Advisory);
}

TEST(ComplianceThickness, NoStructureLayerFails) {
  kernel::WallDetailSpec spec{"W", {layer("mineral wool", LayerFunction::Insulation, 200)}};
  auto v = rule_min_structural_thickness(spec, make_context("reinforced concrete", std::nullopt));
  EXPECT_FALSE(v.passed);
  EXPECT_NE(v.message.find("NoStructuralLayer"), std::string::npos);
}

TEST(ComplianceThickness, GridMatchesBounds) {
  for (int tenth = 900; tenth <= 2000; ++tenth) {
    const double t = tenth / 10.0;
    EXPECT_EQ(thickness_passes("reinforced concrete", t), tenth >= 1000) << t;
    EXPECT_EQ(thickness_passes("timber", t), tenth >= 1400 && tenth <= 1900) << t;
  }
}

TEST(ComplianceMaterial, Matrix) {
  const auto matrix = testkit::load_fixture_json("material_matrix.json");
  ASSERT_EQ(matrix["cases"].size(), 12u);
  const auto vocab = seed_vocabulary();
  for (const auto& c : matrix["cases"]) {
    kernel::WallDetailSpec spec{"W", {}};
    for (const auto& l : c["layers"]) {
      spec.layers.push_back(layer(l[0].get<std::string>(), *kernel::parse_layer_function(l[1].get<std::string>()), 100));
    }
    const auto ctx = make_context(c["requested"].get<std::string>(), std::nullopt, default_rule_params(),
                                  c["vocabulary"].get<bool>() ? &vocab : nullptr);
    EXPECT_EQ(rule_structural_material(spec, ctx).passed, c["passed"].get<bool>()) << c["id"];
  }
}

TEST(ComplianceTotal, RequestedMinimum) {
  const auto spec = testkit::concrete_wall("W", 100);  // 20 + 100 + 100 = 220
  EXPECT_TRUE(rule_requested_total_thickness(spec, make_context("reinforced concrete", 220.0)).passed);
  EXPECT_TRUE(rule_requested_total_thickness(spec, make_context("reinforced concrete", 140.0)).passed);
  EXPECT_FALSE(rule_requested_total_thickness(spec, make_context("reinforced concrete", 220.5)).passed);
  auto skipped = rule_requested_total_thickness(spec, make_context("reinforced concrete", std::nullopt));
  EXPECT_TRUE(skipped.passed);
  EXPECT_TRUE(skipped.skipped);
}

TEST(ComplianceRunChecks, ComposesVerdicts) {
  const auto registry = default_registry();
  auto good = run_checks(testkit::concrete_wall("W", 150), make_context("reinforced concrete", 140.0), registry, 2);
  ASSERT_EQ(good.verdicts.size(), 3u);
  EXPECT_TRUE(good.overall);
  EXPECT_EQ(good.attempt, 2);
  EXPECT_TRUE(good.failed().empty());

  auto thin = run_checks(testkit::concrete_wall("W", 90), make_context("reinforced concrete", 140.0), registry);
  EXPECT_FALSE(thin.overall);
  ASSERT_EQ(thin.failed().size(), 1u);
  EXPECT_EQ(thin.failed()[0]->rule_id, "min_structural_thickness");
  EXPECT_EQ(thin.find("min_structural_thickness")->measured, 90.0);

  auto wrong = run_checks(testkit::timber_wall("W", 160), make_context("reinforced concrete", std::nullopt), registry);
  EXPECT_FALSE(wrong.overall);
  EXPECT_FALSE(wrong.find("structural_material")->passed);
}

TEST(ComplianceRunChecks, EmptyRegistryPasses) {
  auto r = run_checks(testkit::concrete_wall("W"), make_context("timber", std::nullopt), {});
  EXPECT_TRUE(r.overall);
  EXPECT_TRUE(r.verdicts.empty());
}

TEST(ComplianceRunChecks, AdvisoryRuleDoesNotBlock) {
  RuleRegistry registry{{"note", "always fails", Severity::Advisory,
                         [](const auto&, const auto&) { return RuleVerdict{}; }}};
  auto r = run_checks(testkit::concrete_wall("W"), make_context("reinforced concrete", std::nullopt), registry);
  EXPECT_TRUE(r.overall);
  ASSERT_EQ(r.verdicts.size(), 1u);
  EXPECT_EQ(r.verdicts[0].rule_id, "note");
  EXPECT_EQ(r.verdicts[0].message, "always fails failed");
}

TEST(ComplianceReport, JsonAndCsv) {
  auto r = run_checks(testkit::concrete_wall("W", 90), make_context("reinforced concrete", 140.0), default_registry());
  json j = r;
  EXPECT_EQ(j["overall"], false);
  EXPECT_EQ(j["verdicts"][1]["measured"], 90.0);
  EXPECT_EQ(j["verdicts"][1]["unit"], "mm");
  EXPECT_FALSE(j["verdicts"][0].contains("measured"));
  const auto csv = report_csv(r);
  EXPECT_EQ(csv.rfind("attempt,rule_id,passed,skipped,severity,measured,unit,expected,message\n", 0), 0u);
  EXPECT_NE(csv.find("1,min_structural_thickness,false,false,Blocking,90,mm,>= 100 mm,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
