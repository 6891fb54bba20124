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
#include <variant>
#include <vector>

#include "bimflow/grounding/matcher.hpp"
#include "bimflow/grounding/validator.hpp"
#include "bimflow/llm/types.hpp"
#include "bimflow/nlu/types.hpp"

namespace bimflow::grounding {

/// The schema sentence every structuring prompt carries verbatim.
inline constexpr std::string_view kStructuringInstruction =
    "Return in JSON format with 'wall_detail_name' and each layer with 'material', 'layer_type', "
    "'thermal_conductivity' (W/m·K), and 'thickness' (mm), with exact values without units, "
    "and in order of exterior to interior layer.";

enum class StructuringMode { Fused, Split };
std::string_view to_string(StructuringMode mode);
std::optional<StructuringMode> parse_structuring_mode(std::string_view text);

struct ResolveReport {
  // Terms with no library match; they become unverified materials downstream.
  std::vector<std::string> unmatched;
  std::vector<MatchResult> matches;
};

/// Replaces every material term of the frame (structural_material and the
/// layer drafts) by its canonical library name and marks the frame grounded.
std::pair<nlu::TaskFrame, ResolveReport> resolve_frame(const nlu::TaskFrame& frame,
                                                       const Vocabulary& vocabulary);

struct StructuringInput {
  const nlu::TaskFrame* frame = nullptr;
  const Vocabulary* vocabulary = nullptr;
  // Suggested name for the detail; the model may keep it verbatim.
  std::string wall_detail_name;
  // Failed check messages from an earlier attempt of the same turn.
  std::vector<std::string> feedback;
};

/// Throws std::logic_error when the frame is not ready, or not grounded in
/// Split mode.
llm::ChatRequest build_structuring_prompt(const StructuringInput& input, StructuringMode mode);

/// Structuring request that edits an existing wall detail. The reply uses the
/// same schema as build_structuring_prompt.
llm::ChatRequest build_modification_prompt(const kernel::WallDetailSpec& current,
                                           std::string_view modification,
                                           const Vocabulary& vocabulary, StructuringMode mode,
                                           const std::vector<std::string>& feedback = {});

/// Layer drafts completed from the library (type and conductivity) as the
/// JSON array handed to the model; entries stay partial when unknown.
std::string draft_layers_json(const nlu::TaskFrame& frame, const Vocabulary& vocabulary);

/// Rewrites layer materials to canonical library names where they match.
kernel::WallDetailSpec canonicalize_materials(kernel::WallDetailSpec spec, const Vocabulary& vocabulary);

struct RepairState {
  int attempt = 0;
  int budget = 2;
  std::vector<StructuredPayload> history;
};

struct Exhausted {
  RepairState state;
};

/// Next structuring request after an invalid reply: the original prompt, the
/// previous raw reply and the enumerated violations. Exhausted once
/// attempt == budget.
std::variant<llm::ChatRequest, Exhausted> repair(RepairState& state, const StructuredPayload& previous,
                                                 const llm::ChatRequest& original);

// Model rotation, the one SimpleTransform the kernel supports.
struct TransformCommand {
  std::string axis;  // "X", "Y" or "Z"
  double degrees = 0.0;
  bool operator==(const TransformCommand&) const = default;
};

struct TransformPayload {
  std::string raw;
  std::optional<TransformCommand> parsed;
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

llm::ChatRequest build_transform_prompt(const nlu::TaskFrame& frame);
TransformPayload validate_transform_payload(std::string_view raw);

}  // namespace bimflow::grounding
