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

#include <nlohmann/json.hpp>

#include "bimflow/kernel/types.hpp"

namespace bimflow::kernel {

void to_json(nlohmann::json& j, const Material& m);
void to_json(nlohmann::json& j, const WallLayer& layer);
void to_json(nlohmann::json& j, const WallDetailSpec& spec);
void to_json(nlohmann::json& j, const WallType& type);
void to_json(nlohmann::json& j, const WallInstance& instance);
void to_json(nlohmann::json& j, const Project& project);

/// Strict decoding; throws KernelError(CorruptFile) with a JSON path.
Project project_from_json(const nlohmann::json& doc);
WallDetailSpec spec_from_json(const nlohmann::json& doc);

void save_project(const Project& project, const std::filesystem::path& path);
Project load_project(const std::filesystem::path& path);

}  // namespace bimflow::kernel
