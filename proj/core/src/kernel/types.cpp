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

#include "bimflow/kernel/types.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include "bimflow/grounding/normalize.hpp"

namespace bimflow::kernel {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ca = static_cast<unsigned char>(a[i]);
    auto cb = static_cast<unsigned char>(b[i]);
    if (std::tolower(ca) != std::tolower(cb)) return false;
  }
  return true;
}

constexpr std::array<std::pair<LayerFunction, std::string_view>, 5> kLayerNames{{
    {LayerFunction::Structure, "Structure"},
    {LayerFunction::Insulation, "Insulation"},
    {LayerFunction::Finish, "Finish"},
    {LayerFunction::Membrane, "Membrane"},
    {LayerFunction::Substrate, "Substrate"},
}};

constexpr std::array<std::pair<MaterialOrigin, std::string_view>, 3> kOriginNames{{
    {MaterialOrigin::Seed, "seed"},
    {MaterialOrigin::User, "user"},
    {MaterialOrigin::Unverified, "unverified"},
}};

constexpr std::array<std::pair<ComplianceState, std::string_view>, 3> kComplianceNames{{
    {ComplianceState::Unchecked, "unchecked"},
    {ComplianceState::Compliant, "compliant"},
    {ComplianceState::NonCompliant, "non_compliant"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
  for (const auto& [e, name] : table) {
    if (e == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> parse_name(const std::array<std::pair<E, std::string_view>, N>& table,
                            std::string_view text) {
  for (const auto& [e, name] : table) {
    if (iequals(name, text)) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(LayerFunction f) { return name_of(kLayerNames, f); }

std::optional<LayerFunction> parse_layer_function(std::string_view text) {
  return parse_name(kLayerNames, text);
}

const std::vector<LayerFunction>& all_layer_functions() {
  static const std::vector<LayerFunction> all{
      LayerFunction::Structure, LayerFunction::Insulation, LayerFunction::Finish,
      LayerFunction::Membrane, LayerFunction::Substrate};
  return all;
}

std::string_view to_string(MaterialOrigin o) { return name_of(kOriginNames, o); }

std::optional<MaterialOrigin> parse_material_origin(std::string_view text) {
  return parse_name(kOriginNames, text);
}

std::string_view to_string(ComplianceState s) { return name_of(kComplianceNames, s); }

std::optional<ComplianceState> parse_compliance_state(std::string_view text) {
  return parse_name(kComplianceNames, text);
}

std::string_view to_string(KernelErrc code) {
  switch (code) {
    case KernelErrc::DuplicateName: return "DuplicateName";
    case KernelErrc::InvalidSpec: return "InvalidSpec";
    case KernelErrc::NotFound: return "NotFound";
    case KernelErrc::InUse: return "InUse";
    case KernelErrc::InvalidGeometry: return "InvalidGeometry";
    case KernelErrc::IoError: return "IoError";
    case KernelErrc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case KernelErrc::CorruptFile: return "CorruptFile";
  }
  return "?";
}

KernelError::KernelError(KernelErrc code, std::string message, std::string location,
                         std::vector<std::string> ids)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      location_(std::move(location)),
      ids_(std::move(ids)) {}

const Material* Project::find_material(std::string_view name) const {
  const auto key = grounding::normalize_term(name);
  if (key.empty()) return nullptr;
  for (const auto& m : material_library) {
    if (grounding::normalize_term(m.name) == key) return &m;
  }
  return nullptr;
}

const WallType* Project::find_wall_type(std::string_view id) const {
  for (const auto& t : wall_types) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

WallType* Project::find_wall_type(std::string_view id) {
  return const_cast<WallType*>(std::as_const(*this).find_wall_type(id));
}

const WallType* Project::find_wall_type_by_name(std::string_view name) const {
  const auto key = grounding::normalize_term(name);
  if (key.empty()) return nullptr;
  for (const auto& t : wall_types) {
    if (grounding::normalize_term(t.spec.wall_detail_name) == key) return &t;
  }
  return nullptr;
}

const WallInstance* Project::find_instance(std::string_view id) const {
  for (const auto& w : wall_instances) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

WallInstance* Project::find_instance(std::string_view id) {
  return const_cast<WallInstance*>(std::as_const(*this).find_instance(id));
}

bool approx_equal(const WallDetailSpec& a, const WallDetailSpec& b, double epsilon) {
  if (a.wall_detail_name != b.wall_detail_name || a.layers.size() != b.layers.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    const auto& la = a.layers[i];
    const auto& lb = b.layers[i];
    if (la.material != lb.material || la.layer_type != lb.layer_type) return false;
    if (std::fabs(la.thickness - lb.thickness) >= epsilon) return false;
    if (std::fabs(la.thermal_conductivity - lb.thermal_conductivity) >= epsilon) return false;
  }
  return true;
}

}  // namespace bimflow::kernel
