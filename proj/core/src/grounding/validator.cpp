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

#include "bimflow/grounding/validator.hpp"

#include <cmath>
#include <regex>

#include <nlohmann/json.hpp>

#include "bimflow/grounding/normalize.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::grounding {

using nlohmann::json;

namespace {

constexpr std::pair<ViolationCode, std::string_view> kCodes[] = {
    {ViolationCode::MissingField, "MISSING_FIELD"},
    {ViolationCode::UnitString, "UNIT_STRING"},
    {ViolationCode::NotANumber, "NOT_A_NUMBER"},
    {ViolationCode::NonPositive, "NON_POSITIVE"},
    {ViolationCode::UnknownLayerType, "UNKNOWN_LAYER_TYPE"},
    {ViolationCode::EmptyLayers, "EMPTY_LAYERS"},
    {ViolationCode::MalformedJson, "MALFORMED_JSON"},
};

bool looks_like_unit_string(const std::string& text) {
  // A number followed by something that is not part of the number.
  static const std::regex re(R"(^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*[^\s\d.eE+-].*$)");
  return std::regex_match(text, re);
}

class Checker {
 public:
  explicit Checker(std::vector<Violation>& out) : out_(out) {}

  void add(ViolationCode code, std::string path, std::string message) {
    out_.push_back({code, std::move(path), std::move(message)});
  }

  std::optional<std::string> text(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) {
      add(ViolationCode::MissingField, path, "required key is missing");
      return std::nullopt;
    }
    const auto& v = obj[key];
    if (!v.is_string()) {
      add(ViolationCode::MissingField, path, "must be a non-empty string");
      return std::nullopt;
    }
    auto s = v.get<std::string>();
    if (normalize_term(s).empty()) {
      add(ViolationCode::MissingField, path, "must be a non-empty string");
      return std::nullopt;
    }
    return s;
  }

  std::optional<double> positive(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) {
      add(ViolationCode::MissingField, path, "required key is missing");
      return std::nullopt;
    }
    const auto& v = obj[key];
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (looks_like_unit_string(s)) {
        add(ViolationCode::UnitString, path, "'" + s + "' carries a unit; give the bare number");
      } else {
        add(ViolationCode::NotANumber, path, "'" + s + "' is a string, expected a number");
      }
      return std::nullopt;
    }
    if (!v.is_number()) {
      add(ViolationCode::NotANumber, path, "expected a number, got " + std::string(v.type_name()));
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d) || d <= 0.0) {
      add(ViolationCode::NonPositive, path, "must be greater than 0, got " + v.dump());
      return std::nullopt;
    }
    return d;
  }

 private:
  std::vector<Violation>& out_;
};

}  // namespace

std::string_view to_string(ViolationCode code) {
  for (const auto& [c, name] : kCodes) {
    if (c == code) return name;
  }
  return "MALFORMED_JSON";
}

std::optional<ViolationCode> parse_violation_code(std::string_view text) {
  for (const auto& [c, name] : kCodes) {
    if (name == text) return c;
  }
  return std::nullopt;
}

StructuredPayload validate_payload(std::string_view raw) {
  StructuredPayload payload;
  payload.raw = std::string(raw);
  Checker check(payload.violations);

  json doc = json::parse(util::extract_json_text(raw), nullptr, false);
  if (doc.is_discarded()) {
    check.add(ViolationCode::MalformedJson, "$", "reply is not well-formed JSON");
    return payload;
  }
  if (!doc.is_object()) {
    check.add(ViolationCode::MalformedJson, "$", "top level must be a JSON object");
    return payload;
  }

  kernel::WallDetailSpec spec;
  if (auto name = check.text(doc, "wall_detail_name", "wall_detail_name")) spec.wall_detail_name = *name;

  if (!doc.contains("layers")) {
    check.add(ViolationCode::MissingField, "layers", "required key is missing");
  } else if (!doc["layers"].is_array()) {
    check.add(ViolationCode::MissingField, "layers", "must be an array of layers");
  } else if (doc["layers"].empty()) {
    check.add(ViolationCode::EmptyLayers, "layers", "at least one layer is required");
  } else {
    const auto& layers = doc["layers"];
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto base = "layers[" + std::to_string(i) + "]";
      const auto& layer = layers[i];
      if (!layer.is_object()) {
        check.add(ViolationCode::MissingField, base, "layer must be an object");
        continue;
      }
      kernel::WallLayer out;
      auto material = check.text(layer, "material", base + ".material");
      std::optional<kernel::LayerFunction> function;
      const auto type_path = base + ".layer_type";
      if (!layer.contains("layer_type")) {
        check.add(ViolationCode::MissingField, type_path, "required key is missing");
      } else if (!layer["layer_type"].is_string()) {
        check.add(ViolationCode::UnknownLayerType, type_path,
                  "must be one of Structure, Insulation, Finish, Membrane, Substrate");
      } else {
        function = kernel::parse_layer_function(layer["layer_type"].get<std::string>());
        if (!function) {
          check.add(ViolationCode::UnknownLayerType, type_path,
                    "'" + layer["layer_type"].get<std::string>() +
                        "' is not one of Structure, Insulation, Finish, Membrane, Substrate");
        }
      }
      auto conductivity = check.positive(layer, "thermal_conductivity", base + ".thermal_conductivity");
      auto thickness = check.positive(layer, "thickness", base + ".thickness");
      if (material && function && conductivity && thickness) {
        spec.layers.push_back({*material, *function, *conductivity, *thickness});
      }
    }
  }

  if (payload.violations.empty()) payload.parsed = std::move(spec);
  return payload;
}

std::string format_violation(const Violation& v) {
  return std::string(to_string(v.code)) + " at " + v.path + ": " + v.message;
}

void to_json(json& j, const Violation& v) {
  j = json{{"code", to_string(v.code)}, {"path", v.path}, {"message", v.message}};
}

void to_json(json& j, const StructuredPayload& payload) {
  j = json{{"raw", payload.raw}, {"violations", payload.violations}};
  if (payload.parsed) j["parsed"] = *payload.parsed;
}

}  // namespace bimflow::grounding
