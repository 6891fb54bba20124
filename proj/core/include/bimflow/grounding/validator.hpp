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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bimflow/kernel/types.hpp"

namespace bimflow::grounding {

// Stable public enumeration; the spellings are part of the wire format.
enum class ViolationCode {
  MissingField,
  UnitString,
  NotANumber,
  NonPositive,
  UnknownLayerType,
  EmptyLayers,
  MalformedJson,
};

std::string_view to_string(ViolationCode code);  // "MISSING_FIELD", ...
std::optional<ViolationCode> parse_violation_code(std::string_view text);

struct Violation {
  ViolationCode code = ViolationCode::MalformedJson;
  std::string path;
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct StructuredPayload {
  std::string raw;
  std::optional<kernel::WallDetailSpec> parsed;  // present iff violations is empty
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Strict check of a structuring reply against the wall-detail schema.
/// Markdown fences and prose around the outermost object are tolerated;
/// keys beyond the schema are ignored. Every violation is reported.
StructuredPayload validate_payload(std::string_view raw);

std::string format_violation(const Violation& v);

void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const StructuredPayload& payload);

}  // namespace bimflow::grounding
