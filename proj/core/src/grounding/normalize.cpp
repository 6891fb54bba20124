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

#include "bimflow/grounding/normalize.hpp"

#include <cctype>

namespace bimflow::grounding {

std::string normalize_term(std::string_view term) {
  std::string out;
  out.reserve(term.size());
  bool pending_space = false;
  for (char raw : term) {
    auto c = static_cast<unsigned char>(raw);
    if (c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(raw);
      continue;
    }
    if (std::isalnum(c) != 0) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c) != 0 || c == '-' || c == '_' || c == '/') {
      pending_space = true;
    }
    // other punctuation is dropped without splitting the word
  }
  return out;
}

}  // namespace bimflow::grounding
