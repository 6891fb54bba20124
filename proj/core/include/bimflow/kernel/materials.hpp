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
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bimflow/kernel/types.hpp"

namespace bimflow::kernel {

/// Fixture material library bundled with the engine. Conductivities are
/// typical handbook values, not certified product data.
std::vector<Material> seed_materials();

/// Parses a material library document: {"materials": [ {...}, ... ]}.
std::vector<Material> materials_from_json(const nlohmann::json& doc);

/// Empty project holding the seed library.
Project make_seeded_project();

/// Adds a material; returns its id. Throws DuplicateName when a material
/// with the same normalized name exists.
std::string add_material(Project& project, Material material);

}  // namespace bimflow::kernel
