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

namespace bimflow::experiment {

/// Three-letter task code: structure (C reinforced concrete, T timber),
/// insulation (E exterior, I interior) and size (1 or 2).
/// Sizes map to 140/190 mm for concrete and 140/184 mm for timber.
struct PromptCode {
  char structure = 'C';
  char insulation = 'E';
  int size = 1;

  std::string text() const;
  std::string material() const;    // "reinforced concrete" | "timber"
  std::string insulation_method() const;  // "exterior" | "interior"
  double min_thickness_mm() const;
  bool operator==(const PromptCode&) const = default;
};

/// Case-insensitive; nullopt for anything outside the grammar.
std::optional<PromptCode> parse_prompt_code(std::string_view text);

/// Comma-separated list. Throws std::invalid_argument naming the bad entry.
std::vector<PromptCode> parse_code_list(std::string_view text);

/// CE1, CE2, CI1, CI2, TE1, TE2, TI1, TI2.
const std::vector<PromptCode>& all_codes();

std::string expand_prompt_code(const PromptCode& code);

}  // namespace bimflow::experiment
