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

#include "bimflow/nlu/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bimflow/kernel/types.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::nlu {

using nlohmann::json;

namespace {

constexpr std::string_view kClassifyInstruction =
    "You classify requests made to a BIM authoring assistant. Choose exactly one task label from: "
    "CreateWallDetail (create a new wall detail), PlaceWindow (place a window), ModifyWall (modify a "
    "wall), DeleteColumn (delete a column), SimpleTransform (rotate or otherwise transform the "
    "model), Unknown (anything else). Reply with a JSON object {\"task\": <label>, \"confidence\": "
    "<number between 0 and 1>}.";

constexpr std::string_view kFillInstruction =
    "You are an experienced building design consultant. Some information needed to carry out the "
    "request is missing. Use your professional knowledge (climate, typical construction practice, "
    "the stated requirements) to supply plausible values. Reply with a JSON object that maps each "
    "requested slot name to its value. For layer_composition give an array of layers ordered from "
    "exterior to interior, each with \"material\", \"layer_type\" (Structure, Insulation, Finish, "
    "Membrane or Substrate) and \"thickness\" in mm as a number.";

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::optional<double> length_from_json(const json& v) {
  if (v.is_number()) {
    double d = v.get<double>();
    return positive_finite(d) ? std::optional<double>(d) : std::nullopt;
  }
  if (v.is_string()) {
    auto d = util::parse_length_mm(v.get<std::string>());
    if (d && positive_finite(*d)) return d;
  }
  return std::nullopt;
}

std::optional<std::string> enum_match(const SlotSpec& spec, std::string_view text) {
  const auto t = util::trim(text);
  for (const auto& v : spec.enum_values) {
    if (util::iequals(t, v)) return v;
  }
  return std::nullopt;
}

std::optional<LayerDraft> layer_from_json(const json& v) {
  if (v.is_string()) {
    auto parsed = parse_layer_list_text(v.get<std::string>());
    if (parsed.size() == 1) return parsed.front();
    return std::nullopt;
  }
  if (!v.is_object() || !v.contains("material") || !v["material"].is_string()) return std::nullopt;
  LayerDraft layer;
  layer.material = std::string(util::trim(v["material"].get<std::string>()));
  if (layer.material.empty()) return std::nullopt;
  for (const char* key : {"thickness", "thickness_mm"}) {
    if (v.contains(key)) {
      layer.thickness_mm = length_from_json(v[key]);
      break;
    }
  }
  if (v.contains("layer_type") && v["layer_type"].is_string()) {
    if (auto f = kernel::parse_layer_function(v["layer_type"].get<std::string>())) {
      layer.layer_type = std::string(kernel::to_string(*f));
    }
  }
  return layer;
}

// Finds `needle` in `haystack` as a whole token run (not inside a longer word
// or number).
std::optional<Span> find_token(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return std::nullopt;
  std::size_t from = 0;
  while (from <= haystack.size()) {
    auto pos = util::ifind(haystack.substr(from), needle);
    if (pos == std::string_view::npos) return std::nullopt;
    pos += from;
    const auto end = pos + needle.size();
    auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    const bool left_ok = pos == 0 || !word(haystack[pos - 1]) || !word(needle.front());
    const bool right_ok = end >= haystack.size() || !word(haystack[end]) || !word(needle.back());
    if (left_ok && right_ok) return Span{pos, end};
    from = pos + 1;
  }
  return std::nullopt;
}

std::optional<Span> stated_span(std::string_view utterance, const SlotSpec& spec, const json& raw,
                                const SlotContent& value) {
  if (raw.is_string()) {
    if (auto span = find_token(utterance, util::trim(raw.get<std::string>()))) return span;
  }
  switch (spec.type) {
    case SlotType::LengthMm:
    case SlotType::Number:
      if (const auto* d = std::get_if<double>(&value)) return find_token(utterance, util::format_number(*d));
      return std::nullopt;
    case SlotType::LayerList: {
      const auto& layers = std::get<std::vector<LayerDraft>>(value);
      std::optional<Span> first;
      for (const auto& l : layers) {
        auto span = find_token(utterance, l.material);
        if (!span) return std::nullopt;
        if (!first) first = span;
      }
      return first;
    }
    default:
      if (const auto* s = std::get_if<std::string>(&value)) return find_token(utterance, *s);
      return std::nullopt;
  }
}

const json* slots_object(const json& doc) {
  if (!doc.is_object()) return nullptr;
  if (doc.contains("slots") && doc["slots"].is_object()) return &doc["slots"];
  return &doc;
}

void recompute_missing(TaskFrame& frame, const SlotSchema& schema) {
  frame.missing.clear();
  for (const auto& spec : schema.slots) {
    if (spec.required && frame.find(spec.name) == nullptr) frame.missing.push_back(spec.name);
  }
}

void put_slot(TaskFrame& frame, const SlotSchema& schema, SlotValue value) {
  if (auto* existing = frame.find(value.name)) {
    *existing = std::move(value);
    return;
  }
  // Keep slots in schema order.
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < schema.slots.size(); ++i) {
      if (schema.slots[i].name == name) return i;
    }
    return schema.slots.size();
  };
  const auto idx = index_of(value.name);
  auto it = std::find_if(frame.slots.begin(), frame.slots.end(),
                         [&](const SlotValue& s) { return index_of(s.name) > idx; });
  frame.slots.insert(it, std::move(value));
}

std::string describe_slot(const SlotSpec& spec) {
  std::string line = "- " + spec.name + " (" + std::string(to_string(spec.type));
  if (spec.type == SlotType::Enum) {
    line += ": one of";
    for (const auto& v : spec.enum_values) line += " " + v;
  }
  if (spec.type == SlotType::LengthMm) line += ", millimetres";
  line += ")";
  return line;
}

}  // namespace

llm::ChatRequest build_classification_request(std::string_view utterance,
                                              const std::vector<std::string>& context,
                                              const NluConfig& config) {
  llm::ChatRequest request;
  request.system_instruction = std::string(kClassifyInstruction);
  const auto n = std::min(context.size(), config.context_turns);
  if (n > 0) {
    request.system_instruction += "\nRecent dialogue (oldest first):";
    for (auto i = context.size() - n; i < context.size(); ++i) {
      request.system_instruction += "\n" + context[i];
    }
  }
  request.messages.push_back({llm::Role::User, std::string(utterance)});
  request.temperature = config.classify_temperature;
  request.max_tokens = 64;
  request.response_hint = llm::ResponseHint::JsonObject;
  request.tags = {{"step", "interpret"}, {"op", "classify"}};
  return request;
}

Classification parse_classification(std::string_view reply, double threshold) {
  Classification result;
  std::optional<TaskClass> label;
  double confidence = 1.0;
  const auto body = util::extract_json_text(reply);
  json doc = json::parse(body, nullptr, false);
  if (!doc.is_discarded() && doc.is_object()) {
    if (doc.contains("task") && doc["task"].is_string()) label = parse_task_class(doc["task"].get<std::string>());
    if (doc.contains("confidence")) {
      confidence = doc["confidence"].is_number() ? doc["confidence"].get<double>() : 0.0;
    }
  } else if (doc.is_discarded() || doc.is_string()) {
    auto text = doc.is_string() ? doc.get<std::string>() : std::string(reply);
    auto line = std::string(util::trim(text.substr(0, text.find('\n'))));
    while (!line.empty() && (line.back() == '.' || line.back() == '!')) line.pop_back();
    label = parse_task_class(line);
  }
  if (!label) return result;
  if (!std::isfinite(confidence)) confidence = 0.0;
  confidence = std::clamp(confidence, 0.0, 1.0);
  result.confidence = confidence;
  result.task = (confidence < threshold) ? TaskClass::Unknown : *label;
  return result;
}

Classification classify_task(llm::Gateway& gateway, std::string_view utterance,
                             const std::vector<std::string>& context, const NluConfig& config) {
  if (util::trim(utterance).empty()) throw NluError(NluErrc::Precondition, "utterance is empty");
  auto response = gateway.complete(build_classification_request(utterance, context, config));
  return parse_classification(response.content, config.confidence_threshold);
}

llm::ChatRequest build_extraction_request(std::string_view utterance, TaskClass task,
                                          const SlotSchema& schema) {
  llm::ChatRequest request;
  std::string instruction =
      "Extract the information stated in the user's request for the task '" +
      std::string(describe(task)) +
      "'. Reply with a JSON object mapping slot names to values and omit slots the request does "
      "not state. Do not guess. Slots:";
  for (const auto& spec : schema.slots) instruction += "\n" + describe_slot(spec);
  request.system_instruction = std::move(instruction);
  request.messages.push_back({llm::Role::User, std::string(utterance)});
  request.temperature = 0.0;
  request.response_hint = llm::ResponseHint::JsonObject;
  request.tags = {{"step", "interpret"}, {"op", "extract"}, {"task", std::string(to_string(task))}};
  return request;
}

std::optional<SlotContent> parse_slot_json(const SlotSpec& spec, const json& value) {
  if (value.is_null()) return std::nullopt;
  switch (spec.type) {
    case SlotType::String:
    case SlotType::MaterialTerm:
      if (value.is_string()) {
        auto s = std::string(util::trim(value.get<std::string>()));
        if (!s.empty()) return s;
      } else if (spec.type == SlotType::String && value.is_number()) {
        return util::format_number(value.get<double>());
      }
      return std::nullopt;
    case SlotType::LengthMm:
      if (auto d = length_from_json(value)) return *d;
      return std::nullopt;
    case SlotType::Number:
      if (value.is_number()) {
        double d = value.get<double>();
        if (std::isfinite(d)) return d;
      } else if (value.is_string()) {
        if (auto d = util::parse_number(value.get<std::string>())) return *d;
      }
      return std::nullopt;
    case SlotType::Enum:
      if (value.is_string()) {
        if (auto v = enum_match(spec, value.get<std::string>())) return *v;
      }
      return std::nullopt;
    case SlotType::LayerList: {
      if (value.is_string()) {
        auto layers = parse_layer_list_text(value.get<std::string>());
        if (!layers.empty()) return layers;
        return std::nullopt;
      }
      if (!value.is_array() || value.empty()) return std::nullopt;
      std::vector<LayerDraft> layers;
      for (const auto& item : value) {
        auto layer = layer_from_json(item);
        if (!layer) return std::nullopt;
        layers.push_back(std::move(*layer));
      }
      return layers;
    }
  }
  return std::nullopt;
}

TaskFrame frame_from_extraction(std::string_view utterance, TaskClass task, const SlotSchema& schema,
                                std::string_view reply, const NluConfig& config) {
  TaskFrame frame;
  frame.task = task;
  frame.source_utterance = std::string(utterance);
  json doc = json::parse(util::extract_json_text(reply), nullptr, false);
  const json* slots = doc.is_discarded() ? nullptr : slots_object(doc);
  if (slots != nullptr) {
    for (const auto& spec : schema.slots) {
      if (!slots->contains(spec.name)) continue;
      const auto& raw = (*slots)[spec.name];
      auto value = parse_slot_json(spec, raw);
      if (!value) continue;
      SlotValue slot;
      slot.name = spec.name;
      slot.span = stated_span(utterance, spec, raw, *value);
      slot.value = std::move(*value);
      if (slot.span) {
        slot.provenance = Provenance::UserStated;
        slot.confidence = 1.0;
      } else {
        slot.provenance = Provenance::Inferred;
        slot.confidence = std::min(config.inferred_confidence, 0.99);
      }
      frame.slots.push_back(std::move(slot));
    }
  }
  recompute_missing(frame, schema);
  return frame;
}

TaskFrame extract_slots(llm::Gateway& gateway, std::string_view utterance, TaskClass task,
                        const SlotSchema& schema, const NluConfig& config) {
  if (task == TaskClass::Unknown) throw NluError(NluErrc::Precondition, "cannot extract slots for Unknown");
  auto response = gateway.complete(build_extraction_request(utterance, task, schema));
  return frame_from_extraction(utterance, task, schema, response.content, config);
}

std::map<std::string, std::string> slot_tags(const TaskFrame& frame) {
  std::map<std::string, std::string> tags;
  for (const auto& slot : frame.slots) tags[slot.name] = render_value(slot.value);
  return tags;
}

llm::ChatRequest build_fill_request(const TaskFrame& frame, const SlotSchema& schema,
                                    const std::vector<std::string>& slots_to_infer,
                                    const NluConfig& config) {
  std::ostringstream user;
  user << "Request: " << frame.source_utterance << "\n";
  if (!frame.slots.empty()) {
    user << "Known information:\n";
    for (const auto& slot : frame.slots) user << "- " << slot.name << ": " << render_value(slot.value) << "\n";
  }
  user << "Infer values for:\n";
  for (const auto& name : slots_to_infer) {
    if (const auto* spec = schema.find(name)) user << describe_slot(*spec) << "\n";
  }
  llm::ChatRequest request;
  request.system_instruction = std::string(kFillInstruction);
  request.messages.push_back({llm::Role::User, user.str()});
  request.temperature = config.fill_temperature;
  request.response_hint = llm::ResponseHint::JsonObject;
  request.tags = slot_tags(frame);
  request.tags["step"] = "fill";
  request.tags["op"] = "infer";
  request.tags["task"] = std::string(to_string(frame.task));
  return request;
}

ClarificationQuestion make_question(const SlotSpec& spec) {
  ClarificationQuestion q;
  q.slot = spec.name;
  q.text = spec.question;
  q.suggested_answers = spec.enum_values;
  return q;
}

FillResult fill_missing(llm::Gateway& gateway, const TaskFrame& frame, const SlotSchema& schema,
                        const NluConfig& config) {
  if (frame.task == TaskClass::Unknown) throw NluError(NluErrc::Precondition, "cannot fill an Unknown frame");
  FillResult result{frame, {}};
  if (frame.ready()) return result;

  std::vector<std::string> infer;
  for (const auto& name : frame.missing) {
    const auto* spec = schema.find(name);
    if (spec != nullptr && spec->policy == FillPolicy::InferAllowed) infer.push_back(name);
  }
  if (!infer.empty()) {
    // Optional inferable slots ride along so the consultant can keep the
    // proposal coherent (for example the insulation side).
    std::vector<std::string> accept = infer;
    for (const auto& spec : schema.slots) {
      if (!spec.required && spec.policy == FillPolicy::InferAllowed && frame.find(spec.name) == nullptr) {
        accept.push_back(spec.name);
      }
    }
    auto response = gateway.complete(build_fill_request(frame, schema, infer, config));
    json doc = json::parse(util::extract_json_text(response.content), nullptr, false);
    const json* slots = doc.is_discarded() ? nullptr : slots_object(doc);
    if (slots != nullptr) {
      for (const auto& name : accept) {
        if (!slots->contains(name)) continue;
        const auto* spec = schema.find(name);
        auto value = parse_slot_json(*spec, (*slots)[name]);
        if (!value) continue;
        put_slot(result.frame, schema,
                 SlotValue{name, std::move(*value), Provenance::Inferred,
                           std::min(config.inferred_confidence, 0.99), std::nullopt});
      }
    }
    recompute_missing(result.frame, schema);
  }
  for (const auto& name : result.frame.missing) {
    if (const auto* spec = schema.find(name)) result.questions.push_back(make_question(*spec));
  }
  return result;
}

std::vector<LayerDraft> parse_layer_list_text(std::string_view text) {
  std::vector<LayerDraft> layers;
  std::string normalized(text);
  for (auto& c : normalized) {
    if (c == ';' || c == '\n') c = ',';
  }
  static const std::regex number_re(R"([-+]?(\d+(\.\d*)?|\.\d+))");
  for (const auto& item : util::split(normalized, ',')) {
    auto part = std::string(util::trim(item));
    if (part.empty()) continue;
    LayerDraft layer;
    std::smatch m;
    if (std::regex_search(part, m, number_re)) {
      layer.thickness_mm = util::parse_length_mm(part.substr(static_cast<std::size_t>(m.position(0))));
      auto before = std::string(util::trim(part.substr(0, static_cast<std::size_t>(m.position(0)))));
      if (before.empty()) {
        // "200 mm reinforced concrete"
        auto after = part.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
        static const std::regex unit_re(R"(^\s*(mm|cm|m|millimet(er|re)s?|centimet(er|re)s?)\b)",
                                        std::regex::icase);
        after = std::regex_replace(after, unit_re, "");
        before = std::string(util::trim(after));
      }
      layer.material = before;
    } else {
      layer.material = part;
    }
    static const std::regex lead_re(R"(^(of|with|a|an|the)\s+)", std::regex::icase);
    layer.material = std::string(util::trim(std::regex_replace(layer.material, lead_re, "")));
    if (layer.material.empty()) continue;
    if (layer.thickness_mm && !positive_finite(*layer.thickness_mm)) layer.thickness_mm.reset();
    layers.push_back(std::move(layer));
  }
  return layers;
}

TaskFrame apply_answer(const TaskFrame& frame, const ClarificationQuestion& question,
                       std::string_view answer, const SlotSchema& schema) {
  if (std::find(frame.missing.begin(), frame.missing.end(), question.slot) == frame.missing.end()) {
    throw NluError(NluErrc::UnknownSlot, "slot '" + question.slot + "' is not awaiting an answer");
  }
  const auto* spec = schema.find(question.slot);
  if (spec == nullptr) throw NluError(NluErrc::UnknownSlot, "slot '" + question.slot + "' is not in the schema");

  const auto text = std::string(util::trim(answer));
  auto unparseable = [&](const std::string& why) {
    throw NluError(NluErrc::UnparseableAnswer, "'" + text + "' " + why);
  };
  if (text.empty()) unparseable("is empty");

  std::optional<SlotContent> value;
  switch (spec->type) {
    case SlotType::String:
    case SlotType::MaterialTerm:
      value = text;
      break;
    case SlotType::LengthMm:
      if (auto d = util::parse_length_mm(text); d && positive_finite(*d)) value = *d;
      if (!value) unparseable("is not a positive length");
      break;
    case SlotType::Number:
      if (auto d = util::parse_number(text)) value = *d;
      if (!value) unparseable("is not a number");
      break;
    case SlotType::Enum:
      if (auto v = enum_match(*spec, text)) {
        value = *v;
      } else {
        for (const auto& option : spec->enum_values) {
          if (find_token(text, option)) {
            value = option;
            break;
          }
        }
      }
      if (!value) unparseable("is not one of the offered options");
      break;
    case SlotType::LayerList: {
      auto layers = parse_layer_list_text(text);
      if (layers.empty()) unparseable("does not describe any layer");
      value = std::move(layers);
      break;
    }
  }

  TaskFrame next = frame;
  put_slot(next, schema, SlotValue{spec->name, std::move(*value), Provenance::UserAnswered, 1.0, std::nullopt});
  next.missing.erase(std::remove(next.missing.begin(), next.missing.end(), spec->name), next.missing.end());
  return next;
}

}  // namespace bimflow::nlu
