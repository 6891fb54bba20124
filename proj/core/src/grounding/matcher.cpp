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

#include "bimflow/grounding/matcher.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "bimflow/bundled_data.hpp"
#include "bimflow/grounding/normalize.hpp"

namespace bimflow::grounding {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({above + 1, row[j - 1] + 1, diagonal + cost});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double similarity(std::string_view a, std::string_view b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

std::string_view to_string(MatchMethod method) {
  switch (method) {
    case MatchMethod::Exact: return "Exact";
    case MatchMethod::Normalized: return "Normalized";
    case MatchMethod::Synonym: return "Synonym";
    case MatchMethod::Fuzzy: return "Fuzzy";
    case MatchMethod::None: return "None";
  }
  return "None";
}

void AliasTable::add(std::string_view alias, std::string_view canonical) {
  auto key = normalize_term(alias);
  if (!key.empty()) entries_[std::move(key)] = std::string(canonical);
}

std::optional<std::string> AliasTable::lookup(std::string_view term) const {
  auto it = entries_.find(normalize_term(term));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

AliasTable alias_table_from_json(const nlohmann::json& doc) {
  AliasTable table;
  for (const auto& [alias, canonical] : doc.at("aliases").items()) {
    table.add(alias, canonical.get<std::string>());
  }
  return table;
}

const AliasTable& default_alias_table() {
  static const AliasTable table = alias_table_from_json(nlohmann::json::parse(bundled::kAliasesJson));
  return table;
}

MatchResult match_term(std::string_view term, const std::vector<kernel::Material>& library,
                       const AliasTable& aliases, double threshold) {
  MatchResult result;
  result.query = std::string(term);

  for (const auto& m : library) {
    if (m.name == term) {
      result.matched = m;
      result.score = 1.0;
      result.method = MatchMethod::Exact;
      return result;
    }
  }

  const auto needle = normalize_term(term);
  for (const auto& m : library) {
    if (normalize_term(m.name) == needle) {
      result.matched = m;
      result.score = 1.0;
      result.method = MatchMethod::Normalized;
      return result;
    }
  }

  if (!needle.empty()) {
    auto by_name = [&](std::string_view canonical) -> const kernel::Material* {
      const auto key = normalize_term(canonical);
      for (const auto& m : library) {
        if (normalize_term(m.name) == key) return &m;
      }
      return nullptr;
    };
    const kernel::Material* synonym = nullptr;
    for (const auto& m : library) {
      for (const auto& alias : m.aliases) {
        if (normalize_term(alias) == needle) {
          synonym = &m;
          break;
        }
      }
      if (synonym != nullptr) break;
    }
    if (synonym == nullptr) {
      if (auto canonical = aliases.lookup(needle)) synonym = by_name(*canonical);
    }
    if (synonym != nullptr) {
      result.matched = *synonym;
      result.score = 1.0;
      result.method = MatchMethod::Synonym;
      return result;
    }
  }

  const kernel::Material* best = nullptr;
  double best_score = -1.0;
  for (const auto& m : library) {
    const double score = similarity(needle, normalize_term(m.name));
    if (score > best_score || (score == best_score && best != nullptr && m.name < best->name)) {
      best = &m;
      best_score = score;
    }
  }
  if (best == nullptr) return result;
  result.score = best_score;
  if (best_score >= threshold) {
    result.matched = *best;
    result.method = MatchMethod::Fuzzy;
  }
  return result;
}

}  // namespace bimflow::grounding
