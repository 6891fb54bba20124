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

namespace bimflow::util {

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);
bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);
/// Case-insensitive find; npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle);
std::vector<std::string> split(std::string_view text, char sep);

/// Shortest decimal text that reads back to the same double ("140", "12.5").
std::string format_number(double value);

/// Pulls a JSON object out of an LLM reply: strips markdown fences and any
/// prose around the outermost braces. Returns the input unchanged when no
/// braces are present.
std::string extract_json_text(std::string_view reply);

/// First number in the text with an optional length unit, converted to mm.
/// "19 cm" -> 190, "0.14 m" -> 140, "140" -> 140.
std::optional<double> parse_length_mm(std::string_view text);

/// First bare number in the text.
std::optional<double> parse_number(std::string_view text);

}  // namespace bimflow::util
