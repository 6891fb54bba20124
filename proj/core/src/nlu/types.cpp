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

#include "bimflow/nlu/types.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "bimflow/bundled_data.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::nlu {

using nlohmann::json;

namespace {

struct TaskName {
  TaskClass task;
  std::string_view name;
  std::string_view description;
};

constexpr TaskName kTaskNames[] = {
    {TaskClass::CreateWallDetail, "CreateWallDetail", "create a new wall detail"},
    {TaskClass::PlaceWindow, "PlaceWindow", "place a window"},
    {TaskClass::ModifyWall, "ModifyWall", "modify a wall"},
    {TaskClass::DeleteColumn, "DeleteColumn", "delete a column"},
    {TaskClass::SimpleTransform, "SimpleTransform", "rotate the model about an axis"},
    {TaskClass::Unknown, "Unknown", "unknown task"},
};

std::string alnum_lower(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

SlotType parse_slot_type(const std::string& text) {
  static const std::pair<std::string_view, SlotType> kTypes[] = {
      {"string", SlotType::String},     {"material_term", SlotType::MaterialTerm},
      {"length_mm", SlotType::LengthMm}, {"number", SlotType::Number},
      {"enum", SlotType::Enum},         {"layer_list", SlotType::LayerList},
  };
  for (const auto& [name, type] : kTypes) {
    if (name == text) return type;
  }
  throw NluError(NluErrc::InvalidSchema, "unknown slot type '" + text + "'");
}

}  // namespace

std::string_view to_string(TaskClass task) {
  for (const auto& t : kTaskNames) {
    if (t.task == task) return t.name;
  }
  return "Unknown";
}

std::optional<TaskClass> parse_task_class(std::string_view text) {
  const auto key = alnum_lower(text);
  if (key.empty()) return std::nullopt;
  for (const auto& t : kTaskNames) {
    if (alnum_lower(t.name) == key) return t.task;
  }
  return std::nullopt;
}

const std::vector<TaskClass>& known_tasks() {
  static const std::vector<TaskClass> tasks{TaskClass::CreateWallDetail, TaskClass::PlaceWindow,
                                            TaskClass::ModifyWall, TaskClass::DeleteColumn,
                                            TaskClass::SimpleTransform};
  return tasks;
}

std::string_view describe(TaskClass task) {
  for (const auto& t : kTaskNames) {
    if (t.task == task) return t.description;
  }
  return "unknown task";
}

std::string_view to_string(SlotType type) {
  switch (type) {
    case SlotType::String: return "string";
    case SlotType::MaterialTerm: return "material_term";
    case SlotType::LengthMm: return "length_mm";
    case SlotType::Number: return "number";
    case SlotType::Enum: return "enum";
    case SlotType::LayerList: return "layer_list";
  }
  return "string";
}

std::string_view to_string(FillPolicy policy) {
  return policy == FillPolicy::MustAsk ? "MustAsk" : "InferAllowed";
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::UserStated: return "UserStated";
    case Provenance::Inferred: return "Inferred";
    case Provenance::UserAnswered: return "UserAnswered";
  }
  return "UserStated";
}

std::string_view to_string(NluErrc code) {
  switch (code) {
    case NluErrc::UnknownSlot: return "UnknownSlot";
    case NluErrc::UnparseableAnswer: return "UnparseableAnswer";
    case NluErrc::Precondition: return "Precondition";
    case NluErrc::InvalidSchema: return "InvalidSchema";
  }
  return "?";
}

NluError::NluError(NluErrc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

const SlotSpec* SlotSchema::find(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const SlotSchema& SchemaRegistry::at(TaskClass task) const {
  static const SlotSchema kEmpty{};
  auto it = schemas_.find(task);
  return it == schemas_.end() ? kEmpty : it->second;
}

void SchemaRegistry::set(SlotSchema schema) { schemas_[schema.task] = std::move(schema); }

SchemaRegistry schema_registry_from_json(const json& doc) {
  SchemaRegistry registry;
  try {
    for (const auto& [task_name, slots] : doc.at("tasks").items()) {
      auto task = parse_task_class(task_name);
      if (!task || *task == TaskClass::Unknown) {
        throw NluError(NluErrc::InvalidSchema, "unknown task '" + task_name + "'");
      }
      SlotSchema schema;
      schema.task = *task;
      for (const auto& s : slots) {
        SlotSpec spec;
        spec.name = s.at("name").get<std::string>();
        spec.type = parse_slot_type(s.value("type", std::string("string")));
        spec.required = s.value("required", false);
        const auto policy = s.value("policy", std::string("InferAllowed"));
        if (policy == "MustAsk") {
          spec.policy = FillPolicy::MustAsk;
        } else if (policy == "InferAllowed") {
          spec.policy = FillPolicy::InferAllowed;
        } else {
          throw NluError(NluErrc::InvalidSchema, "unknown fill policy '" + policy + "'");
        }
        spec.enum_values = s.value("values", std::vector<std::string>{});
        if (spec.type == SlotType::Enum && spec.enum_values.empty()) {
          throw NluError(NluErrc::InvalidSchema, spec.name + ": enum slot without values");
        }
        spec.question = s.value("question", "Please provide " + spec.name + ".");
        if (schema.find(spec.name) != nullptr) {
          throw NluError(NluErrc::InvalidSchema, "duplicate slot '" + spec.name + "'");
        }
        schema.slots.push_back(std::move(spec));
      }
      registry.set(std::move(schema));
    }
  } catch (const json::exception& e) {
    throw NluError(NluErrc::InvalidSchema, e.what());
  }
  return registry;
}

const SchemaRegistry& default_schema_registry() {
  static const SchemaRegistry registry = schema_registry_from_json(json::parse(bundled::kSlotSchemasJson));
  return registry;
}

const SlotValue* TaskFrame::find(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

SlotValue* TaskFrame::find(std::string_view name) {
  for (auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::optional<std::string> TaskFrame::text(std::string_view name) const {
  const auto* slot = find(name);
  if (slot == nullptr) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&slot->value)) return *s;
  if (const auto* d = std::get_if<double>(&slot->value)) return util::format_number(*d);
  return std::nullopt;
}

std::optional<double> TaskFrame::number(std::string_view name) const {
  const auto* slot = find(name);
  if (slot == nullptr) return std::nullopt;
  if (const auto* d = std::get_if<double>(&slot->value)) return *d;
  return std::nullopt;
}

const std::vector<LayerDraft>* TaskFrame::layers(std::string_view name) const {
  const auto* slot = find(name);
  return slot == nullptr ? nullptr : std::get_if<std::vector<LayerDraft>>(&slot->value);
}

std::string render_value(const SlotContent& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  if (const auto* d = std::get_if<double>(&value)) return util::format_number(*d);
  return json(std::get<std::vector<LayerDraft>>(value)).dump();
}

void to_json(json& j, const LayerDraft& layer) {
  j = json{{"material", layer.material}};
  if (layer.layer_type) j["layer_type"] = *layer.layer_type;
  if (layer.thickness_mm) j["thickness"] = *layer.thickness_mm;
}

void to_json(json& j, const SlotValue& slot) {
  j = json{{"name", slot.name}, {"provenance", to_string(slot.provenance)}, {"confidence", slot.confidence}};
  std::visit([&](const auto& v) { j["value"] = v; }, slot.value);
  if (slot.span) j["span"] = {slot.span->begin, slot.span->end};
}

void to_json(json& j, const TaskFrame& frame) {
  j = json{{"task", to_string(frame.task)},
           {"slots", frame.slots},
           {"missing", frame.missing},
           {"source_utterance", frame.source_utterance},
           {"grounded", frame.grounded}};
}

void to_json(json& j, const ClarificationQuestion& question) {
  j = json{{"slot", question.slot},
           {"text", question.text},
           {"suggested_answers", question.suggested_answers},
           {"attempt", question.attempt}};
}

}  // namespace bimflow::nlu
