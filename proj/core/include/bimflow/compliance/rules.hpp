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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bimflow/grounding/matcher.hpp"
#include "bimflow/kernel/types.hpp"

namespace bimflow::compliance {

enum class StructuralFamily { ReinforcedConcrete, Timber, Other };
std::string_view to_string(StructuralFamily family);

enum class Severity { Blocking, Advisory };
std::string_view to_string(Severity severity);

// Bounds are in mm. Comparisons allow kBoundarySlack for summation noise
// only; a value 1e-6 mm short of a bound fails.
inline constexpr double kBoundarySlack = 1e-9;

struct RuleParams {
  double rc_min_thickness = 100.0;
  // Treat the concrete minimum as exclusive (> instead of >=).
  bool strict_rc_threshold = false;
  double timber_min_thickness = 140.0;
  double timber_max_thickness = 190.0;
  // Normalized canonical material name -> family.
  std::map<std::string, StructuralFamily> family_map;
};

/// Bundled defaults (concrete >= 100 mm, timber 140..190 mm).
const RuleParams& default_rule_params();
/// Overlays a parameter document on `base`. Throws std::invalid_argument.
RuleParams rule_params_from_json(const nlohmann::json& doc, RuleParams base = default_rule_params());

struct RequirementContext {
  std::string requested_structural_material;
  std::optional<double> requested_min_thickness;
  StructuralFamily structural_family = StructuralFamily::Other;
  // Optional library used to resolve layer materials before comparing.
  const grounding::Vocabulary* vocabulary = nullptr;
};

/// Context whose family is derived from the material via the mapping table.
RequirementContext make_context(std::string_view material, std::optional<double> min_thickness,
                                const RuleParams& params = default_rule_params(),
                                const grounding::Vocabulary* vocabulary = nullptr);

StructuralFamily family_of(std::string_view material, const RuleParams& params = default_rule_params());

struct RuleVerdict {
  std::string rule_id;
  bool passed = false;
  bool skipped = false;
  Severity severity = Severity::Blocking;
  std::optional<double> measured;
  std::string unit;
  std::string expected;
  std::string message;
  bool operator==(const RuleVerdict&) const = default;
};

struct CheckReport {
  std::vector<RuleVerdict> verdicts;
  bool overall = true;
  int attempt = 1;

  std::vector<const RuleVerdict*> failed() const;
  const RuleVerdict* find(std::string_view rule_id) const;
  bool operator==(const CheckReport&) const = default;
};

struct Rule {
  std::string id;
  std::string description;
  Severity severity = Severity::Blocking;
  std::function<RuleVerdict(const kernel::WallDetailSpec&, const RequirementContext&)> predicate;
};

using RuleRegistry = std::vector<Rule>;

RuleVerdict rule_structural_material(const kernel::WallDetailSpec& spec, const RequirementContext& ctx);
RuleVerdict rule_min_structural_thickness(const kernel::WallDetailSpec& spec, const RequirementContext& ctx,
                                          const RuleParams& params = default_rule_params());
RuleVerdict rule_requested_total_thickness(const kernel::WallDetailSpec& spec, const RequirementContext& ctx);

/// structural_material, min_structural_thickness, requested_total_thickness.
RuleRegistry default_registry(const RuleParams& params = default_rule_params());

/// Evaluates every rule; overall is the conjunction of Blocking verdicts.
CheckReport run_checks(const kernel::WallDetailSpec& spec, const RequirementContext& ctx,
                       const RuleRegistry& registry, int attempt = 1);

void to_json(nlohmann::json& j, const RuleVerdict& verdict);
void to_json(nlohmann::json& j, const CheckReport& report);

/// CSV rendering: header plus one row per verdict.
std::string report_csv(const CheckReport& report);

}  // namespace bimflow::compliance
