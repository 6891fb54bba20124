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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bimflow/llm/gateway.hpp"
#include "bimflow/nlu/types.hpp"

namespace bimflow::nlu {

struct NluConfig {
  // Classifications below this confidence degrade to Unknown.
  double confidence_threshold = 0.5;
  // Dialogue turns included as classification context.
  std::size_t context_turns = 6;
  double classify_temperature = 0.0;
  double fill_temperature = 0.7;
  // Confidence attached to values the model supplied on its own.
  double inferred_confidence = 0.7;
};

struct Classification {
  TaskClass task = TaskClass::Unknown;
  double confidence = 0.0;
};

llm::ChatRequest build_classification_request(std::string_view utterance,
                                              const std::vector<std::string>& context,
                                              const NluConfig& config = {});

/// Closed-set parse of a classifier reply. Accepts {"task": ..., "confidence": ...}
/// or a bare label; anything else yields Unknown with confidence 0.
Classification parse_classification(std::string_view reply, double threshold = 0.5);

Classification classify_task(llm::Gateway& gateway, std::string_view utterance,
                             const std::vector<std::string>& context, const NluConfig& config = {});

llm::ChatRequest build_extraction_request(std::string_view utterance, TaskClass task,
                                          const SlotSchema& schema);

/// Builds a frame from an extraction reply. Values found verbatim in the
/// utterance are UserStated with their span; others are Inferred.
TaskFrame frame_from_extraction(std::string_view utterance, TaskClass task, const SlotSchema& schema,
                                std::string_view reply, const NluConfig& config = {});

TaskFrame extract_slots(llm::Gateway& gateway, std::string_view utterance, TaskClass task,
                        const SlotSchema& schema, const NluConfig& config = {});

struct FillResult {
  TaskFrame frame;
  std::vector<ClarificationQuestion> questions;
};

llm::ChatRequest build_fill_request(const TaskFrame& frame, const SlotSchema& schema,
                                    const std::vector<std::string>& slots_to_infer,
                                    const NluConfig& config = {});

/// Infers InferAllowed slots through a consultant prompt and turns the
/// rest of the missing slots into questions, in schema order.
FillResult fill_missing(llm::Gateway& gateway, const TaskFrame& frame, const SlotSchema& schema,
                        const NluConfig& config = {});

/// Throws NluError(UnknownSlot) when the question's slot is not missing and
/// NluError(UnparseableAnswer) when the answer does not fit the slot type.
TaskFrame apply_answer(const TaskFrame& frame, const ClarificationQuestion& question,
                       std::string_view answer, const SlotSchema& schema);

ClarificationQuestion make_question(const SlotSpec& spec);

/// Parses one slot value from a model reply; nullopt when unusable.
std::optional<SlotContent> parse_slot_json(const SlotSpec& spec, const nlohmann::json& value);

/// "reinforced concrete 200 mm, mineral wool 100" -> layer drafts.
std::vector<LayerDraft> parse_layer_list_text(std::string_view text);

/// Request tags describing the filled slots (layer lists as JSON).
std::map<std::string, std::string> slot_tags(const TaskFrame& frame);

}  // namespace bimflow::nlu
