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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bimflow::kernel {

/// Role a layer plays in a wall assembly. Structure marks the load-bearing
/// layer that the compliance rules inspect.
enum class LayerFunction { Structure, Insulation, Finish, Membrane, Substrate };

std::string_view to_string(LayerFunction f);
/// Case-insensitive parse of the enumerator names.
std::optional<LayerFunction> parse_layer_function(std::string_view text);
const std::vector<LayerFunction>& all_layer_functions();

enum class MaterialOrigin { Seed, User, Unverified };

std::string_view to_string(MaterialOrigin o);
std::optional<MaterialOrigin> parse_material_origin(std::string_view text);

struct Material {
  std::string id;
  std::string name;
  LayerFunction default_layer_type = LayerFunction::Finish;
  double thermal_conductivity = 0.0;  // W/(m·K)
  std::vector<std::string> aliases;
  MaterialOrigin origin = MaterialOrigin::Seed;

  bool operator==(const Material&) const = default;
};

struct WallLayer {
  std::string material;  // canonical library name
  LayerFunction layer_type = LayerFunction::Structure;
  double thermal_conductivity = 0.0;  // W/(m·K)
  double thickness = 0.0;             // mm

  bool operator==(const WallLayer&) const = default;
};

/// Layered wall description. layers[0] is the exterior-most layer.
struct WallDetailSpec {
  std::string wall_detail_name;
  std::vector<WallLayer> layers;

  bool operator==(const WallDetailSpec&) const = default;
};

enum class ComplianceState { Unchecked, Compliant, NonCompliant };

std::string_view to_string(ComplianceState s);
std::optional<ComplianceState> parse_compliance_state(std::string_view text);

struct WallType {
  std::string id;
  WallDetailSpec spec;
  std::optional<std::string> created_from;
  std::int64_t revision = 1;
  ComplianceState compliance = ComplianceState::Unchecked;
  // Scope token of the retry loop that created this type, if any. A later
  // apply_wall_detail in the same scope updates the type instead of failing
  // on the duplicate name.
  std::optional<std::string> created_in;

  bool operator==(const WallType&) const = default;
};

struct Point2 {
  double x = 0.0;  // m
  double y = 0.0;  // m

  bool operator==(const Point2&) const = default;
};

struct Segment2 {
  Point2 start;
  Point2 end;

  bool operator==(const Segment2&) const = default;
};

struct WallInstance {
  std::string id;
  std::string wall_type;
  Segment2 baseline;
  double height = 0.0;  // m

  bool operator==(const WallInstance&) const = default;
};

/// Accumulated whole-model rotation in degrees about each axis, [0, 360).
struct ModelOrientation {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const ModelOrientation&) const = default;
};

inline constexpr int kSchemaVersion = 1;

struct Project {
  int schema_version = kSchemaVersion;
  std::vector<Material> material_library;
  std::vector<WallType> wall_types;
  std::vector<WallInstance> wall_instances;
  ModelOrientation orientation;
  std::int64_t next_id = 1;

  bool operator==(const Project&) const = default;

  const Material* find_material(std::string_view name) const;
  const WallType* find_wall_type(std::string_view id) const;
  WallType* find_wall_type(std::string_view id);
  const WallType* find_wall_type_by_name(std::string_view name) const;
  const WallInstance* find_instance(std::string_view id) const;
  WallInstance* find_instance(std::string_view id);
};

struct ExecutionResult {
  std::vector<std::string> mutated_ids;
  WallDetailSpec produced_spec;
  std::string summary;
};

enum class KernelErrc {
  DuplicateName,
  InvalidSpec,
  NotFound,
  InUse,
  InvalidGeometry,
  IoError,
  SchemaVersionMismatch,
  CorruptFile,
};

std::string_view to_string(KernelErrc code);

class KernelError : public std::runtime_error {
 public:
  KernelError(KernelErrc code, std::string message, std::string location = {},
              std::vector<std::string> ids = {});

  KernelErrc code() const noexcept { return code_; }
  /// Field path for InvalidSpec, JSON location for CorruptFile.
  const std::string& location() const noexcept { return location_; }
  /// Referencing ids for InUse.
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  KernelErrc code_;
  std::string location_;
  std::vector<std::string> ids_;
};

/// Tolerance for thickness equality comparisons, in mm.
inline constexpr double kThicknessEpsilon = 1e-6;

bool approx_equal(const WallDetailSpec& a, const WallDetailSpec& b,
                  double epsilon = kThicknessEpsilon);

}  // namespace bimflow::kernel
