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

#include "bimflow/experiment/prompt_codes.hpp"

#include <cctype>
#include <stdexcept>

#include "bimflow/util/text.hpp"

namespace bimflow::experiment {

std::string PromptCode::text() const {
  return std::string{structure, insulation} + std::to_string(size);
}

std::string PromptCode::material() const {
  return structure == 'C' ? "reinforced concrete" : "timber";
}

std::string PromptCode::insulation_method() const {
  return insulation == 'E' ? "exterior" : "interior";
}

double PromptCode::min_thickness_mm() const {
  if (structure == 'C') return size == 1 ? 140.0 : 190.0;
  return size == 1 ? 140.0 : 184.0;
}

std::optional<PromptCode> parse_prompt_code(std::string_view text) {
  text = util::trim(text);
  if (text.size() != 3) return std::nullopt;
  PromptCode code;
  code.structure = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  code.insulation = static_cast<char>(std::toupper(static_cast<unsigned char>(text[1])));
  if (code.structure != 'C' && code.structure != 'T') return std::nullopt;
  if (code.insulation != 'E' && code.insulation != 'I') return std::nullopt;
  if (text[2] != '1' && text[2] != '2') return std::nullopt;
  code.size = text[2] - '0';
  return code;
}

std::vector<PromptCode> parse_code_list(std::string_view text) {
  std::vector<PromptCode> out;
  for (const auto& part : util::split(text, ',')) {
    if (util::trim(part).empty()) continue;
    auto code = parse_prompt_code(part);
    if (!code) throw std::invalid_argument("unknown prompt code '" + part + "'");
    out.push_back(*code);
  }
  if (out.empty()) throw std::invalid_argument("no prompt codes given");
  return out;
}

const std::vector<PromptCode>& all_codes() {
  static const std::vector<PromptCode> codes = [] {
    std::vector<PromptCode> v;
    for (char s : {'C', 'T'})
      for (char i : {'E', 'I'})
        for (int n : {1, 2}) v.push_back({s, i, n});
    return v;
  }();
  return codes;
}

std::string expand_prompt_code(const PromptCode& code) {
  return "Propose a wall detail using a " + code.material() + " structure and " + code.insulation_method() +
         " insulation method, ensuring a minimum thickness of " + util::format_number(code.min_thickness_mm()) +
         " mm.";
}

}  // namespace bimflow::experiment
