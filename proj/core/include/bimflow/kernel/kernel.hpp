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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bimflow/kernel/types.hpp"

namespace bimflow::kernel {

// Every mutating operation is transactional: on error the project is left
// exactly as it was. Callers serialize mutations on one project.

/// Throws KernelError(InvalidSpec) naming the first violated field path.
void validate_spec(const WallDetailSpec& spec);

/// Exact sum of layer thicknesses in mm.
double total_thickness(const WallDetailSpec& spec);

std::string create_wall_type(Project& project, const WallDetailSpec& spec);

std::string duplicate_wall_type(Project& project, std::string_view source_id,
                                std::string_view new_name);

const WallType& modify_wall_type(Project& project, std::string_view id,
                                 const WallDetailSpec& new_spec);

void delete_wall_type(Project& project, std::string_view id);

std::string place_wall(Project& project, std::string_view type_id,
                       const Segment2& baseline, double height);

void replace_wall_type(Project& project, std::string_view instance_id,
                       std::string_view new_type_id);

void set_compliance(Project& project, std::string_view type_id,
                    ComplianceState state);

struct ApplyOptions {
  std::optional<std::string> target_instance;
  // Types created under the same scope may be overwritten by name.
  std::optional<std::string> retry_scope;
};

ExecutionResult apply_wall_detail(Project& project, const WallDetailSpec& spec,
                                  const ApplyOptions& options = {});

/// Rotates the whole model about one axis ("X", "Y" or "Z").
ExecutionResult rotate_model(Project& project, std::string_view axis,
                             double degrees);

/// Lists dangling references; empty when the project is consistent.
std::vector<std::string> integrity_violations(const Project& project);

}  // namespace bimflow::kernel
