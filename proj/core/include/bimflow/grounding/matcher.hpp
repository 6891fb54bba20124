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

#include "bimflow/kernel/types.hpp"

namespace bimflow::grounding {

inline constexpr double kDefaultThreshold = 0.8;

/// Levenshtein distance over bytes (unit insert/delete/substitute costs).
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 1 - distance / max(|a|, |b|); 1.0 for two empty strings.
double similarity(std::string_view a, std::string_view b);

enum class MatchMethod { Exact, Normalized, Synonym, Fuzzy, None };
std::string_view to_string(MatchMethod method);

struct MatchResult {
  std::string query;
  std::optional<kernel::Material> matched;
  double score = 0.0;
  MatchMethod method = MatchMethod::None;
};

/// Normalized alias -> canonical material name.
class AliasTable {
 public:
  AliasTable() = default;

  void add(std::string_view alias, std::string_view canonical);
  std::optional<std::string> lookup(std::string_view term) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
};

/// Parses {"aliases": {"alias": "canonical", ...}}.
AliasTable alias_table_from_json(const nlohmann::json& doc);
const AliasTable& default_alias_table();

/// Library vocabulary used by the Match step and by the material rule.
struct Vocabulary {
  std::vector<kernel::Material> library;
  AliasTable aliases;
  double threshold = kDefaultThreshold;
};

/// Exact -> Normalized -> Synonym -> Fuzzy; first hit wins. Fuzzy compares
/// against canonical names only and breaks ties by the smallest name. A miss
/// reports the best fuzzy score with method None.
MatchResult match_term(std::string_view term, const std::vector<kernel::Material>& library,
                       const AliasTable& aliases, double threshold = kDefaultThreshold);

inline MatchResult match_term(std::string_view term, const Vocabulary& vocabulary) {
  return match_term(term, vocabulary.library, vocabulary.aliases, vocabulary.threshold);
}

}  // namespace bimflow::grounding
