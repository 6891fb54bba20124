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

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bimflow::nlu {

enum class TaskClass { CreateWallDetail, PlaceWindow, ModifyWall, DeleteColumn, SimpleTransform, Unknown };

std::string_view to_string(TaskClass task);
/// Accepts the enum spelling in any case, with or without separators
/// ("CreateWallDetail", "create_wall_detail", "create wall detail").
std::optional<TaskClass> parse_task_class(std::string_view text);
/// Classifiable tasks in declaration order, Unknown excluded.
const std::vector<TaskClass>& known_tasks();
/// Short human description used in prompts and clarification turns.
std::string_view describe(TaskClass task);

enum class SlotType { String, MaterialTerm, LengthMm, Number, Enum, LayerList };
enum class FillPolicy { InferAllowed, MustAsk };

std::string_view to_string(SlotType type);
std::string_view to_string(FillPolicy policy);

struct SlotSpec {
  std::string name;
  SlotType type = SlotType::String;
  bool required = false;
  FillPolicy policy = FillPolicy::InferAllowed;
  std::vector<std::string> enum_values;
  std::string question;
};

struct SlotSchema {
  TaskClass task = TaskClass::Unknown;
  std::vector<SlotSpec> slots;

  const SlotSpec* find(std::string_view name) const;
};

class SchemaRegistry {
 public:
  SchemaRegistry() = default;
  explicit SchemaRegistry(std::map<TaskClass, SlotSchema> schemas) : schemas_(std::move(schemas)) {}

  /// Empty schema for tasks without an entry.
  const SlotSchema& at(TaskClass task) const;
  void set(SlotSchema schema);

 private:
  std::map<TaskClass, SlotSchema> schemas_;
};

/// Parses {"tasks": {"<TaskClass>": [slot, ...]}}. Throws NluError.
SchemaRegistry schema_registry_from_json(const nlohmann::json& doc);
/// Bundled registry.
const SchemaRegistry& default_schema_registry();

/// One proposed layer before structuring. Thickness in mm.
struct LayerDraft {
  std::string material;
  std::optional<double> thickness_mm;
  std::optional<std::string> layer_type;
  bool operator==(const LayerDraft&) const = default;
};

using SlotContent = std::variant<std::string, double, std::vector<LayerDraft>>;

enum class Provenance { UserStated, Inferred, UserAnswered };
std::string_view to_string(Provenance provenance);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct SlotValue {
  std::string name;
  SlotContent value;
  Provenance provenance = Provenance::UserStated;
  double confidence = 1.0;
  // Byte range of the stated value in the source utterance.
  std::optional<Span> span;
  bool operator==(const SlotValue&) const = default;
};

struct TaskFrame {
  TaskClass task = TaskClass::Unknown;
  std::vector<SlotValue> slots;
  // Required slots without a value, in schema order.
  std::vector<std::string> missing;
  std::string source_utterance;
  std::vector<std::string> dialogue_context;
  // Set once material terms were resolved against the library.
  bool grounded = false;

  bool ready() const noexcept { return missing.empty(); }
  const SlotValue* find(std::string_view name) const;
  SlotValue* find(std::string_view name);
  std::optional<std::string> text(std::string_view name) const;
  std::optional<double> number(std::string_view name) const;
  const std::vector<LayerDraft>* layers(std::string_view name) const;
  bool operator==(const TaskFrame&) const = default;
};

struct ClarificationQuestion {
  std::string slot;
  std::string text;
  std::vector<std::string> suggested_answers;
  // Incremented each time the question is re-asked after a bad answer.
  int attempt = 1;
  bool operator==(const ClarificationQuestion&) const = default;
};

enum class NluErrc { UnknownSlot, UnparseableAnswer, Precondition, InvalidSchema };
std::string_view to_string(NluErrc code);

class NluError : public std::runtime_error {
 public:
  NluError(NluErrc code, const std::string& message);
  NluErrc code() const noexcept { return code_; }

 private:
  NluErrc code_;
};

/// Text rendering of a slot value ("140", "exterior", JSON for layer lists).
std::string render_value(const SlotContent& value);

void to_json(nlohmann::json& j, const LayerDraft& layer);
void to_json(nlohmann::json& j, const SlotValue& slot);
void to_json(nlohmann::json& j, const TaskFrame& frame);
void to_json(nlohmann::json& j, const ClarificationQuestion& question);

}  // namespace bimflow::nlu
