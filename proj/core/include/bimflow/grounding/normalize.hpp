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

#include <string>
#include <string_view>

namespace bimflow::grounding {

/// Canonical comparison form of a vocabulary term: ASCII-lowercased,
/// '-', '_' and '/' turned into spaces, remaining punctuation dropped,
/// whitespace trimmed and collapsed. Non-ASCII bytes pass through.
std::string normalize_term(std::string_view term);

}  // namespace bimflow::grounding
