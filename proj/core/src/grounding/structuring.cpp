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

#include "bimflow/grounding/structuring.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bimflow/kernel/persistence.hpp"
#include "bimflow/nlu/interpreter.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::grounding {

using nlohmann::json;

namespace {

constexpr std::string_view kStructuringRole =
    "You are a BIM wall-detailing assistant. Convert the design request into one structured wall "
    "detail.";

constexpr std::string_view kTransformRole =
    "Convert the model transformation request into a JSON object {\"operation\": \"rotate\", "
    "\"axis\": \"X\" | \"Y\" | \"Z\", \"angle_degrees\": <number>} with exact values without units.";

void add_slot_line(std::ostringstream& out, const nlu::TaskFrame& frame, std::string_view slot,
                   std::string_view label, std::string_view unit = {}) {
  if (auto v = frame.text(slot)) {
    out << label << ": " << *v;
    if (!unit.empty()) out << ' ' << unit;
    out << '\n';
  }
}

void add_library_and_feedback(std::ostringstream& user, const Vocabulary& vocabulary,
                              StructuringMode mode, const std::vector<std::string>& feedback) {
  if (mode == StructuringMode::Fused) {
    user << "Use material names from this library wherever one fits, and name a material yourself "
            "only when none does: ";
    for (std::size_t i = 0; i < vocabulary.library.size(); ++i) {
      if (i > 0) user << "; ";
      user << vocabulary.library[i].name;
    }
    user << ".\n";
  }
  if (!feedback.empty()) {
    user << "The previous wall detail failed these checks and must be corrected:\n";
    for (const auto& f : feedback) user << "- " << f << '\n';
  }
  user << kStructuringInstruction;
}

}  // namespace

std::string_view to_string(StructuringMode mode) { return mode == StructuringMode::Fused ? "Fused" : "Split"; }

std::optional<StructuringMode> parse_structuring_mode(std::string_view text) {
  if (util::iequals(text, "fused")) return StructuringMode::Fused;
  if (util::iequals(text, "split")) return StructuringMode::Split;
  return std::nullopt;
}

std::pair<nlu::TaskFrame, ResolveReport> resolve_frame(const nlu::TaskFrame& frame,
                                                       const Vocabulary& vocabulary) {
  nlu::TaskFrame out = frame;
  ResolveReport report;
  auto resolve = [&](std::string& term) {
    auto result = match_term(term, vocabulary);
    if (result.matched) {
      term = result.matched->name;
    } else if (std::find(report.unmatched.begin(), report.unmatched.end(), term) == report.unmatched.end()) {
      report.unmatched.push_back(term);
    }
    report.matches.push_back(std::move(result));
  };
  for (auto& slot : out.slots) {
    if (slot.name == "structural_material") {
      if (auto* s = std::get_if<std::string>(&slot.value)) resolve(*s);
    } else if (auto* layers = std::get_if<std::vector<nlu::LayerDraft>>(&slot.value)) {
      for (auto& layer : *layers) resolve(layer.material);
    }
  }
  out.grounded = true;
  return {std::move(out), std::move(report)};
}

std::string draft_layers_json(const nlu::TaskFrame& frame, const Vocabulary& vocabulary) {
  json layers = json::array();
  if (const auto* drafts = frame.layers("layer_composition")) {
    for (const auto& d : *drafts) {
      json layer{{"material", d.material}};
      auto match = match_term(d.material, vocabulary);
      if (match.matched) layer["material"] = match.matched->name;
      if (d.layer_type) {
        layer["layer_type"] = *d.layer_type;
      } else if (match.matched) {
        layer["layer_type"] = kernel::to_string(match.matched->default_layer_type);
      }
      if (match.matched) layer["thermal_conductivity"] = match.matched->thermal_conductivity;
      if (d.thickness_mm) layer["thickness"] = *d.thickness_mm;
      layers.push_back(std::move(layer));
    }
  }
  return layers.dump();
}

llm::ChatRequest build_structuring_prompt(const StructuringInput& input, StructuringMode mode) {
  if (input.frame == nullptr || input.vocabulary == nullptr) {
    throw std::logic_error("structuring prompt needs a frame and a vocabulary");
  }
  const auto& frame = *input.frame;
  if (!frame.ready()) throw std::logic_error("structuring prompt requested for a frame that is not ready");
  if (mode == StructuringMode::Split && !frame.grounded) {
    throw std::logic_error("split-mode structuring requires a grounded frame");
  }

  std::ostringstream user;
  user << "Design request: " << frame.source_utterance << '\n';
  add_slot_line(user, frame, "structural_material", "Structural material");
  add_slot_line(user, frame, "insulation_method", "Insulation method");
  add_slot_line(user, frame, "min_thickness", "Minimum total thickness", "mm");
  add_slot_line(user, frame, "location", "Location");
  if (const auto* drafts = frame.layers("layer_composition")) {
    user << "Proposed layers (exterior to interior):\n";
    int n = 1;
    for (const auto& d : *drafts) {
      user << n++ << ". " << d.material;
      if (d.layer_type) user << " (" << *d.layer_type << ')';
      if (d.thickness_mm) user << ", " << util::format_number(*d.thickness_mm) << " mm";
      user << '\n';
    }
  }
  if (!input.wall_detail_name.empty()) {
    user << "Use the wall detail name \"" << input.wall_detail_name << "\".\n";
  }
  add_library_and_feedback(user, *input.vocabulary, mode, input.feedback);

  llm::ChatRequest request;
  request.system_instruction = std::string(kStructuringRole);
  request.messages.push_back({llm::Role::User, user.str()});
  request.temperature = 0.0;
  request.response_hint = llm::ResponseHint::JsonObject;
  request.tags = nlu::slot_tags(frame);
  request.tags["step"] = "structure";
  request.tags["op"] = "structure";
  request.tags["task"] = std::string(nlu::to_string(frame.task));
  request.tags["mode"] = std::string(to_string(mode));
  request.tags["wall_detail_name"] = input.wall_detail_name;
  request.tags["draft_layers"] = draft_layers_json(frame, *input.vocabulary);
  return request;
}

llm::ChatRequest build_modification_prompt(const kernel::WallDetailSpec& current,
                                           std::string_view modification,
                                           const Vocabulary& vocabulary, StructuringMode mode,
                                           const std::vector<std::string>& feedback) {
  const std::string current_json = json(current).dump();
  std::ostringstream user;
  user << "Current wall detail: " << current_json << '\n';
  user << "Requested modification: " << modification << '\n';
  user << "Keep the wall detail name \"" << current.wall_detail_name << "\".\n";
  add_library_and_feedback(user, vocabulary, mode, feedback);

  llm::ChatRequest request;
  request.system_instruction = std::string(kStructuringRole);
  request.messages.push_back({llm::Role::User, user.str()});
  request.temperature = 0.0;
  request.response_hint = llm::ResponseHint::JsonObject;
  request.tags["step"] = "structure";
  request.tags["op"] = "modify";
  request.tags["task"] = "ModifyWall";
  request.tags["mode"] = std::string(to_string(mode));
  request.tags["modification"] = std::string(modification);
  request.tags["wall_detail_name"] = current.wall_detail_name;
  request.tags["current_spec"] = current_json;
  return request;
}

kernel::WallDetailSpec canonicalize_materials(kernel::WallDetailSpec spec, const Vocabulary& vocabulary) {
  for (auto& layer : spec.layers) {
    auto match = match_term(layer.material, vocabulary);
    if (match.matched) layer.material = match.matched->name;
  }
  return spec;
}

std::variant<llm::ChatRequest, Exhausted> repair(RepairState& state, const StructuredPayload& previous,
                                                 const llm::ChatRequest& original) {
  if (state.attempt >= state.budget) return Exhausted{state};
  state.history.push_back(previous);
  ++state.attempt;

  std::ostringstream feedback;
  feedback << "Your reply has the following problems:\n";
  int n = 1;
  for (const auto& v : previous.violations) feedback << n++ << ". " << format_violation(v) << '\n';
  feedback << "Return the corrected JSON object only.";
  if (original.tags.count("op") == 0 || original.tags.at("op") != "transform") {
    feedback << ' ' << kStructuringInstruction;
  }

  llm::ChatRequest request;
  request.system_instruction = original.system_instruction;
  request.messages.push_back({llm::Role::User, original.messages.empty() ? std::string() : original.messages.front().content});
  request.messages.push_back({llm::Role::Assistant, previous.raw.empty() ? std::string("(empty reply)") : previous.raw});
  request.messages.push_back({llm::Role::User, feedback.str()});
  request.temperature = original.temperature;
  request.max_tokens = original.max_tokens;
  request.response_hint = original.response_hint;
  request.model = original.model;
  request.tags = original.tags;
  request.tags["op"] = "repair";
  request.tags["repair_attempt"] = std::to_string(state.attempt);
  return request;
}

llm::ChatRequest build_transform_prompt(const nlu::TaskFrame& frame) {
  std::ostringstream user;
  user << "Request: " << frame.source_utterance << '\n';
  add_slot_line(user, frame, "axis", "Axis");
  add_slot_line(user, frame, "angle_degrees", "Angle", "degrees");
  llm::ChatRequest request;
  request.system_instruction = std::string(kTransformRole);
  request.messages.push_back({llm::Role::User, user.str()});
  request.temperature = 0.0;
  request.response_hint = llm::ResponseHint::JsonObject;
  request.tags = nlu::slot_tags(frame);
  request.tags["step"] = "structure";
  request.tags["op"] = "transform";
  request.tags["task"] = std::string(nlu::to_string(frame.task));
  return request;
}

TransformPayload validate_transform_payload(std::string_view raw) {
  TransformPayload payload;
  payload.raw = std::string(raw);
  auto add = [&](ViolationCode code, std::string path, std::string message) {
    payload.violations.push_back({code, std::move(path), std::move(message)});
  };
  json doc = json::parse(util::extract_json_text(raw), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    add(ViolationCode::MalformedJson, "$", "reply is not a JSON object");
    return payload;
  }
  TransformCommand cmd;
  if (!doc.contains("operation") || !doc["operation"].is_string()) {
    add(ViolationCode::MissingField, "operation", "required string key is missing");
  } else if (!util::iequals(doc["operation"].get<std::string>(), "rotate")) {
    add(ViolationCode::MissingField, "operation", "only 'rotate' is supported");
  }
  if (!doc.contains("axis") || !doc["axis"].is_string()) {
    add(ViolationCode::MissingField, "axis", "required string key is missing");
  } else {
    auto axis = util::to_lower(util::trim(doc["axis"].get<std::string>()));
    if (axis == "x" || axis == "y" || axis == "z") {
      cmd.axis = std::string(1, static_cast<char>(axis[0] - 'a' + 'A'));
    } else {
      add(ViolationCode::MissingField, "axis", "must be X, Y or Z");
    }
  }
  if (!doc.contains("angle_degrees")) {
    add(ViolationCode::MissingField, "angle_degrees", "required key is missing");
  } else if (doc["angle_degrees"].is_string()) {
    add(ViolationCode::UnitString, "angle_degrees", "give the bare number");
  } else if (!doc["angle_degrees"].is_number() || !std::isfinite(doc["angle_degrees"].get<double>())) {
    add(ViolationCode::NotANumber, "angle_degrees", "expected a number");
  } else {
    cmd.degrees = doc["angle_degrees"].get<double>();
  }
  if (payload.violations.empty()) payload.parsed = cmd;
  return payload;
}

}  // namespace bimflow::grounding
