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

#include "bimflow/compliance/rules.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bimflow/bundled_data.hpp"
#include "bimflow/grounding/normalize.hpp"
#include "bimflow/kernel/kernel.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::compliance {

using nlohmann::json;

namespace {

std::optional<StructuralFamily> parse_family(std::string_view text) {
  if (text == "ReinforcedConcrete") return StructuralFamily::ReinforcedConcrete;
  if (text == "Timber") return StructuralFamily::Timber;
  if (text == "Other") return StructuralFamily::Other;
  return std::nullopt;
}

std::string mm(double v) { return util::format_number(v) + " mm"; }

std::string canonical(std::string_view material, const grounding::Vocabulary* vocabulary) {
  if (vocabulary != nullptr) {
    auto match = grounding::match_term(material, *vocabulary);
    if (match.matched) return grounding::normalize_term(match.matched->name);
  }
  return grounding::normalize_term(material);
}

std::vector<const kernel::WallLayer*> structure_layers(const kernel::WallDetailSpec& spec) {
  std::vector<const kernel::WallLayer*> out;
  for (const auto& layer : spec.layers) {
    if (layer.layer_type == kernel::LayerFunction::Structure) out.push_back(&layer);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(StructuralFamily family) {
  switch (family) {
    case StructuralFamily::ReinforcedConcrete: return "ReinforcedConcrete";
    case StructuralFamily::Timber: return "Timber";
    case StructuralFamily::Other: return "Other";
  }
  return "Other";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Blocking ? "Blocking" : "Advisory";
}

RuleParams rule_params_from_json(const json& doc, RuleParams base) {
  try {
    if (doc.contains("strict_rc_threshold")) base.strict_rc_threshold = doc["strict_rc_threshold"].get<bool>();
    if (doc.contains("families")) {
      const auto& f = doc["families"];
      if (f.contains("ReinforcedConcrete")) {
        base.rc_min_thickness = f["ReinforcedConcrete"].value("min_thickness", base.rc_min_thickness);
      }
      if (f.contains("Timber")) {
        base.timber_min_thickness = f["Timber"].value("min_thickness", base.timber_min_thickness);
        base.timber_max_thickness = f["Timber"].value("max_thickness", base.timber_max_thickness);
      }
    }
    if (doc.contains("family_map")) {
      for (const auto& [material, family] : doc["family_map"].items()) {
        auto parsed = parse_family(family.get<std::string>());
        if (!parsed) throw std::invalid_argument("unknown structural family '" + family.get<std::string>() + "'");
        base.family_map[grounding::normalize_term(material)] = *parsed;
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("rule parameters: ") + e.what());
  }
  if (!(base.timber_min_thickness <= base.timber_max_thickness)) {
    throw std::invalid_argument("rule parameters: timber min_thickness exceeds max_thickness");
  }
  return base;
}

const RuleParams& default_rule_params() {
  static const RuleParams params = rule_params_from_json(json::parse(bundled::kRulesJson), RuleParams{});
  return params;
}

StructuralFamily family_of(std::string_view material, const RuleParams& params) {
  auto it = params.family_map.find(grounding::normalize_term(material));
  return it == params.family_map.end() ? StructuralFamily::Other : it->second;
}

RequirementContext make_context(std::string_view material, std::optional<double> min_thickness,
                                const RuleParams& params, const grounding::Vocabulary* vocabulary) {
  RequirementContext ctx;
  ctx.requested_structural_material = std::string(material);
  ctx.requested_min_thickness = min_thickness;
  ctx.vocabulary = vocabulary;
  ctx.structural_family = family_of(canonical(material, vocabulary), params);
  return ctx;
}

std::vector<const RuleVerdict*> CheckReport::failed() const {
  std::vector<const RuleVerdict*> out;
  for (const auto& v : verdicts) {
    if (!v.passed) out.push_back(&v);
  }
  return out;
}

const RuleVerdict* CheckReport::find(std::string_view rule_id) const {
  for (const auto& v : verdicts) {
    if (v.rule_id == rule_id) return &v;
  }
  return nullptr;
}

RuleVerdict rule_structural_material(const kernel::WallDetailSpec& spec, const RequirementContext& ctx) {
  RuleVerdict v;
  v.rule_id = "structural_material";
  v.expected = "a Structure layer of " + ctx.requested_structural_material;
  const auto layers = structure_layers(spec);
  if (layers.empty()) {
    v.message = "NoStructuralLayer: the wall detail has no layer of type Structure";
    return v;
  }
  const auto wanted = canonical(ctx.requested_structural_material, ctx.vocabulary);
  std::string found;
  for (const auto* layer : layers) {
    if (canonical(layer->material, ctx.vocabulary) == wanted) {
      v.passed = true;
      v.message = "Structure layer uses " + layer->material;
      return v;
    }
    if (!found.empty()) found += ", ";
    found += layer->material;
  }
  v.message = "requested structural material " + ctx.requested_structural_material +
              " but the Structure layer uses " + found;
  return v;
}

RuleVerdict rule_min_structural_thickness(const kernel::WallDetailSpec& spec, const RequirementContext& ctx,
                                          const RuleParams& params) {
  RuleVerdict v;
  v.rule_id = "min_structural_thickness";
  v.unit = "mm";
  const auto layers = structure_layers(spec);
  if (layers.empty()) {
    v.expected = "a Structure layer";
    v.message = "NoStructuralLayer: no Structure layer to measure";
    return v;
  }
  double measured = 0.0;
  for (const auto* layer : layers) measured += layer->thickness;
  v.measured = measured;

  switch (ctx.structural_family) {
    case StructuralFamily::ReinforcedConcrete: {
      const double bound = params.rc_min_thickness;
      if (params.strict_rc_threshold) {
        v.expected = "> " + mm(bound);
        v.passed = measured > bound + kBoundarySlack;
      } else {
        v.expected = ">= " + mm(bound);
        v.passed = measured >= bound - kBoundarySlack;
      }
      break;
    }
    case StructuralFamily::Timber:
      v.expected = mm(params.timber_min_thickness) + " to " + mm(params.timber_max_thickness);
      v.passed = measured >= params.timber_min_thickness - kBoundarySlack &&
                 measured <= params.timber_max_thickness + kBoundarySlack;
      break;
    case StructuralFamily::Other:
      v.severity = Severity::Advisory;
      v.passed = true;
      v.expected = "no minimum defined";
      v.message = "no thickness rule for " + ctx.requested_structural_material + "; not checked";
      return v;
  }
  v.message = "structural thickness " + mm(measured) + (v.passed ? " satisfies " : " violates ") + v.expected;
  return v;
}

RuleVerdict rule_requested_total_thickness(const kernel::WallDetailSpec& spec, const RequirementContext& ctx) {
  RuleVerdict v;
  v.rule_id = "requested_total_thickness";
  v.unit = "mm";
  const double total = kernel::total_thickness(spec);
  v.measured = total;
  if (!ctx.requested_min_thickness) {
    v.passed = true;
    v.skipped = true;
    v.expected = "no minimum requested";
    v.message = "skipped: the request states no minimum thickness";
    return v;
  }
  v.expected = ">= " + mm(*ctx.requested_min_thickness);
  v.passed = total >= *ctx.requested_min_thickness - kBoundarySlack;
  v.message = "total thickness " + mm(total) + (v.passed ? " satisfies " : " violates ") + v.expected;
  return v;
}

RuleRegistry default_registry(const RuleParams& params) {
  RuleRegistry registry;
  registry.push_back({"structural_material", "Structure layer uses the requested material", Severity::Blocking,
                      rule_structural_material});
  registry.push_back({"min_structural_thickness", "Load-bearing layer meets the family's thickness bounds",
                      Severity::Blocking, [params](const auto& spec, const auto& ctx) {
                        return rule_min_structural_thickness(spec, ctx, params);
                      }});
  registry.push_back({"requested_total_thickness", "Total thickness meets the requested minimum",
                      Severity::Blocking, rule_requested_total_thickness});
  return registry;
}

CheckReport run_checks(const kernel::WallDetailSpec& spec, const RequirementContext& ctx,
                       const RuleRegistry& registry, int attempt) {
  CheckReport report;
  report.attempt = attempt;
  for (const auto& rule : registry) {
    auto verdict = rule.predicate(spec, ctx);
    verdict.rule_id = rule.id;
    if (rule.severity == Severity::Advisory) verdict.severity = Severity::Advisory;
    if (!verdict.passed && verdict.message.empty()) verdict.message = rule.description + " failed";
    if (verdict.severity == Severity::Blocking && !verdict.passed) report.overall = false;
    report.verdicts.push_back(std::move(verdict));
  }
  return report;
}

void to_json(json& j, const RuleVerdict& v) {
  j = json{{"rule_id", v.rule_id},   {"passed", v.passed},     {"skipped", v.skipped},
           {"severity", to_string(v.severity)}, {"expected", v.expected}, {"message", v.message}};
  if (v.measured) {
    j["measured"] = *v.measured;
    j["unit"] = v.unit;
  }
}

void to_json(json& j, const CheckReport& report) {
  j = json{{"verdicts", report.verdicts}, {"overall", report.overall}, {"attempt", report.attempt}};
}

std::string report_csv(const CheckReport& report) {
  std::ostringstream out;
  out << "attempt,rule_id,passed,skipped,severity,measured,unit,expected,message\n";
  for (const auto& v : report.verdicts) {
    out << report.attempt << ',' << csv_field(v.rule_id) << ',' << (v.passed ? "true" : "false") << ','
        << (v.skipped ? "true" : "false") << ',' << to_string(v.severity) << ','
        << (v.measured ? util::format_number(*v.measured) : std::string()) << ',' << csv_field(v.unit) << ','
        << csv_field(v.expected) << ',' << csv_field(v.message) << '\n';
  }
  return out.str();
}

}  // namespace bimflow::compliance
