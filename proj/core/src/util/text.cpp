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

#include "bimflow/util/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

namespace bimflow::util {

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

std::size_t ifind(std::string_view haystack, std::string_view needle) {
  return to_lower(haystack).find(to_lower(needle));
}

bool icontains(std::string_view haystack, std::string_view needle) {
  return ifind(haystack, needle) != std::string::npos;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

std::string extract_json_text(std::string_view reply) {
  auto text = trim(reply);
  auto open = text.find('{');
  auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::string(text);
  }
  return std::string(text.substr(open, close - open + 1));
}

namespace {

const std::regex& length_pattern() {
  static const std::regex re(
      R"(([+-]?\d+(?:\.\d+)?)\s*(millimet(?:er|re)s?|mm|centimet(?:er|re)s?|cm|met(?:er|re)s?|m|inch(?:es)?|in|")?(?![A-Za-z]))",
      std::regex::icase);
  return re;
}

}  // namespace

std::optional<double> parse_length_mm(std::string_view text) {
  std::string s(text);
  std::smatch m;
  if (!std::regex_search(s, m, length_pattern())) return std::nullopt;
  double value = std::stod(m[1].str());
  auto unit = to_lower(m[2].str());
  double scale = 1.0;
  if (unit.empty() || unit == "mm" || unit.starts_with("millimet")) {
    scale = 1.0;
  } else if (unit == "cm" || unit.starts_with("centimet")) {
    scale = 10.0;
  } else if (unit == "m" || unit.starts_with("met")) {
    scale = 1000.0;
  } else {
    scale = 25.4;
  }
  double mm = value * scale;
  if (!std::isfinite(mm)) return std::nullopt;
  return mm;
}

std::optional<double> parse_number(std::string_view text) {
  static const std::regex re(R"([+-]?\d+(?:\.\d+)?)");
  std::string s(text);
  std::smatch m;
  if (!std::regex_search(s, m, re)) return std::nullopt;
  return std::stod(m[0].str());
}

}  // namespace bimflow::util
