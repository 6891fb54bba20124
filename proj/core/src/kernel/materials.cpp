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

#include "bimflow/kernel/materials.hpp"

#include <nlohmann/json.hpp>

#include "bimflow/bundled_data.hpp"
#include "bimflow/grounding/normalize.hpp"

namespace bimflow::kernel {

std::vector<Material> materials_from_json(const nlohmann::json& doc) {
  std::vector<Material> out;
  const auto& list = doc.at("materials");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& entry = list[i];
    Material m;
    m.name = entry.at("name").get<std::string>();
    const auto type = entry.value("default_layer_type", std::string("Finish"));
    auto parsed = parse_layer_function(type);
    if (!parsed) {
      throw KernelError(KernelErrc::CorruptFile, "unknown layer type '" + type + "'",
                        "materials[" + std::to_string(i) + "].default_layer_type");
    }
    m.default_layer_type = *parsed;
    m.thermal_conductivity = entry.at("thermal_conductivity").get<double>();
    if (!(m.thermal_conductivity > 0.0)) {
      throw KernelError(KernelErrc::CorruptFile, "thermal_conductivity must be > 0",
                        "materials[" + std::to_string(i) + "].thermal_conductivity");
    }
    m.aliases = entry.value("aliases", std::vector<std::string>{});
    m.origin = parse_material_origin(entry.value("origin", std::string("seed")))
                   .value_or(MaterialOrigin::Seed);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Material> seed_materials() {
  static const auto cached = materials_from_json(nlohmann::json::parse(bundled::kMaterialsJson));
  return cached;
}

std::string add_material(Project& project, Material material) {
  if (grounding::normalize_term(material.name).empty()) {
    throw KernelError(KernelErrc::InvalidSpec, "material name is empty", "name");
  }
  if (!(material.thermal_conductivity > 0.0)) {
    throw KernelError(KernelErrc::InvalidSpec, "thermal_conductivity must be > 0",
                      "thermal_conductivity");
  }
  if (const auto* existing = project.find_material(material.name)) {
    throw KernelError(KernelErrc::DuplicateName,
                      "material '" + material.name + "' already exists as " + existing->id,
                      "name", {existing->id});
  }
  material.id = "mat-" + std::to_string(project.next_id++);
  auto id = material.id;
  project.material_library.push_back(std::move(material));
  return id;
}

Project make_seeded_project() {
  Project project;
  for (auto& m : seed_materials()) add_material(project, std::move(m));
  return project;
}

}  // namespace bimflow::kernel
