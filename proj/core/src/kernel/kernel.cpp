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

#include "bimflow/kernel/kernel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "bimflow/grounding/normalize.hpp"
#include "bimflow/kernel/materials.hpp"

namespace bimflow::kernel {

namespace {

std::string next_id(Project& project, std::string_view prefix) {
  std::string id(prefix);
  id += '-';
  id += std::to_string(project.next_id++);
  return id;
}

[[noreturn]] void invalid(std::string path, std::string message) {
  throw KernelError(KernelErrc::InvalidSpec, path + ": " + message, path);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Rewrites layer materials to their library spelling, adding unknown
// materials flagged unverified.
void bind_materials(Project& project, WallDetailSpec& spec) {
  for (auto& layer : spec.layers) {
    if (const auto* m = project.find_material(layer.material)) {
      layer.material = m->name;
      continue;
    }
    Material added;
    added.name = layer.material;
    added.default_layer_type = layer.layer_type;
    added.thermal_conductivity = layer.thermal_conductivity;
    added.origin = MaterialOrigin::Unverified;
    add_material(project, std::move(added));
  }
}

void require_unused_name(const Project& project, std::string_view name,
                         std::string_view except_id = {}) {
  if (const auto* t = project.find_wall_type_by_name(name); t && t->id != except_id) {
    throw KernelError(KernelErrc::DuplicateName,
                      "wall type name '" + std::string(name) + "' is used by " + t->id,
                      "wall_detail_name", {t->id});
  }
}

const WallType& require_type(const Project& project, std::string_view id) {
  const auto* t = project.find_wall_type(id);
  if (t == nullptr) {
    throw KernelError(KernelErrc::NotFound, "no wall type '" + std::string(id) + "'");
  }
  return *t;
}

std::string describe_layers(const WallDetailSpec& spec) {
  std::ostringstream os;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    if (i) os << " | ";
    os << l.material << " " << l.thickness << " mm (" << to_string(l.layer_type) << ")";
  }
  return os.str();
}

}  // namespace

void validate_spec(const WallDetailSpec& spec) {
  if (grounding::normalize_term(spec.wall_detail_name).empty()) {
    invalid("wall_detail_name", "empty");
  }
  if (spec.layers.empty()) invalid("layers", "empty");
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& layer = spec.layers[i];
    const auto base = "layers[" + std::to_string(i) + "]";
    if (grounding::normalize_term(layer.material).empty()) {
      invalid(base + ".material", "empty");
    }
    if (!positive_finite(layer.thickness)) {
      invalid(base + ".thickness", "must be a finite number > 0");
    }
    if (!positive_finite(layer.thermal_conductivity)) {
      invalid(base + ".thermal_conductivity", "must be a finite number > 0");
    }
  }
}

double total_thickness(const WallDetailSpec& spec) {
  double sum = 0.0;
  for (const auto& layer : spec.layers) sum += layer.thickness;
  return sum;
}

std::string create_wall_type(Project& project, const WallDetailSpec& spec) {
  validate_spec(spec);
  require_unused_name(project, spec.wall_detail_name);

  Project next = project;
  WallType type;
  type.id = next_id(next, "wt");
  type.spec = spec;
  bind_materials(next, type.spec);
  auto id = type.id;
  next.wall_types.push_back(std::move(type));
  project = std::move(next);
  return id;
}

std::string duplicate_wall_type(Project& project, std::string_view source_id,
                                std::string_view new_name) {
  const auto& source = require_type(project, source_id);
  if (grounding::normalize_term(new_name).empty()) invalid("wall_detail_name", "empty");
  require_unused_name(project, new_name);

  WallType copy;
  copy.spec = source.spec;
  copy.spec.wall_detail_name = std::string(new_name);
  copy.created_from = source.id;

  Project next = project;
  copy.id = next_id(next, "wt");
  auto id = copy.id;
  next.wall_types.push_back(std::move(copy));
  project = std::move(next);
  return id;
}

const WallType& modify_wall_type(Project& project, std::string_view id,
                                 const WallDetailSpec& new_spec) {
  require_type(project, id);
  validate_spec(new_spec);
  require_unused_name(project, new_spec.wall_detail_name, id);

  Project next = project;
  auto spec = new_spec;
  bind_materials(next, spec);
  auto* type = next.find_wall_type(id);
  type->spec = std::move(spec);
  type->revision += 1;
  type->compliance = ComplianceState::Unchecked;
  project = std::move(next);
  return *project.find_wall_type(id);
}

void delete_wall_type(Project& project, std::string_view id) {
  require_type(project, id);
  std::vector<std::string> users;
  for (const auto& w : project.wall_instances) {
    if (w.wall_type == id) users.push_back(w.id);
  }
  if (!users.empty()) {
    std::string list;
    for (const auto& u : users) list += (list.empty() ? "" : ", ") + u;
    throw KernelError(KernelErrc::InUse,
                      "wall type '" + std::string(id) + "' is used by " + list, {}, users);
  }
  std::erase_if(project.wall_types, [&](const WallType& t) { return t.id == id; });
}

std::string place_wall(Project& project, std::string_view type_id, const Segment2& baseline,
                       double height) {
  require_type(project, type_id);
  const auto& s = baseline.start;
  const auto& e = baseline.end;
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(e.x) || !std::isfinite(e.y)) {
    throw KernelError(KernelErrc::InvalidGeometry, "baseline coordinates must be finite");
  }
  if (s == e) {
    throw KernelError(KernelErrc::InvalidGeometry, "baseline has zero length");
  }
  if (!positive_finite(height)) {
    throw KernelError(KernelErrc::InvalidGeometry, "height must be > 0");
  }
  WallInstance instance;
  instance.id = next_id(project, "wi");
  instance.wall_type = std::string(type_id);
  instance.baseline = baseline;
  instance.height = height;
  auto id = instance.id;
  project.wall_instances.push_back(std::move(instance));
  return id;
}

void replace_wall_type(Project& project, std::string_view instance_id,
                       std::string_view new_type_id) {
  auto* instance = project.find_instance(instance_id);
  if (instance == nullptr) {
    throw KernelError(KernelErrc::NotFound,
                      "no wall instance '" + std::string(instance_id) + "'");
  }
  require_type(project, new_type_id);
  instance->wall_type = std::string(new_type_id);
}

void set_compliance(Project& project, std::string_view type_id, ComplianceState state) {
  require_type(project, type_id);
  project.find_wall_type(type_id)->compliance = state;
}

ExecutionResult apply_wall_detail(Project& project, const WallDetailSpec& spec,
                                  const ApplyOptions& options) {
  validate_spec(spec);
  if (options.target_instance && project.find_instance(*options.target_instance) == nullptr) {
    throw KernelError(KernelErrc::NotFound,
                      "no wall instance '" + *options.target_instance + "'");
  }

  Project next = project;
  ExecutionResult result;
  std::string type_id;
  const auto* existing = next.find_wall_type_by_name(spec.wall_detail_name);
  if (existing != nullptr && options.retry_scope && existing->created_in == options.retry_scope) {
    type_id = existing->id;
    const auto& updated = modify_wall_type(next, type_id, spec);
    result.summary = "Updated wall type '" + updated.spec.wall_detail_name + "' (" + type_id +
                     ", revision " + std::to_string(updated.revision) + ")";
  } else {
    type_id = create_wall_type(next, spec);
    next.find_wall_type(type_id)->created_in = options.retry_scope;
    result.summary = "Created wall type '" + spec.wall_detail_name + "' (" + type_id + ")";
  }
  result.mutated_ids.push_back(type_id);

  if (options.target_instance) {
    replace_wall_type(next, *options.target_instance, type_id);
    result.mutated_ids.push_back(*options.target_instance);
    result.summary += "; assigned to " + *options.target_instance;
  }

  result.produced_spec = next.find_wall_type(type_id)->spec;
  std::ostringstream os;
  os << result.summary << ": " << describe_layers(result.produced_spec) << "; total "
     << total_thickness(result.produced_spec) << " mm";
  result.summary = os.str();
  project = std::move(next);
  return result;
}

ExecutionResult rotate_model(Project& project, std::string_view axis, double degrees) {
  if (!std::isfinite(degrees)) {
    throw KernelError(KernelErrc::InvalidGeometry, "rotation angle must be finite");
  }
  double* slot = nullptr;
  const char a = axis.size() == 1 ? static_cast<char>(std::toupper(axis[0])) : '\0';
  switch (a) {
    case 'X': slot = &project.orientation.x; break;
    case 'Y': slot = &project.orientation.y; break;
    case 'Z': slot = &project.orientation.z; break;
    default:
      throw KernelError(KernelErrc::InvalidGeometry,
                        "unknown rotation axis '" + std::string(axis) + "'");
  }
  double v = std::fmod(*slot + degrees, 360.0);
  if (v < 0) v += 360.0;
  *slot = v;

  ExecutionResult result;
  result.mutated_ids.push_back("model");
  std::ostringstream os;
  os << "Rotated model " << degrees << " degrees about the " << a << " axis";
  result.summary = os.str();
  return result;
}

std::vector<std::string> integrity_violations(const Project& project) {
  std::vector<std::string> out;
  std::vector<std::string> ids;
  for (const auto& m : project.material_library) ids.push_back(m.id);
  for (const auto& t : project.wall_types) {
    ids.push_back(t.id);
    for (std::size_t i = 0; i < t.spec.layers.size(); ++i) {
      if (project.find_material(t.spec.layers[i].material) == nullptr) {
        out.push_back(t.id + ".layers[" + std::to_string(i) + "].material '" +
                      t.spec.layers[i].material + "' is not in the library");
      }
    }
    const auto* same_name = project.find_wall_type_by_name(t.spec.wall_detail_name);
    if (same_name != nullptr && same_name->id != t.id) {
      out.push_back(t.id + " shares its name with another wall type");
    }
  }
  for (const auto& w : project.wall_instances) {
    ids.push_back(w.id);
    if (project.find_wall_type(w.wall_type) == nullptr) {
      out.push_back(w.id + " references missing wall type '" + w.wall_type + "'");
    }
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    out.push_back("duplicate entity ids");
  }
  return out;
}

}  // namespace bimflow::kernel
