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

#include "bimflow/kernel/persistence.hpp"

#include <fstream>
#include <sstream>

#include "bimflow/kernel/kernel.hpp"

namespace bimflow::kernel {

using nlohmann::json;

void to_json(json& j, const Material& m) {
  j = json{{"id", m.id},
           {"name", m.name},
           {"default_layer_type", to_string(m.default_layer_type)},
           {"thermal_conductivity", m.thermal_conductivity},
           {"aliases", m.aliases},
           {"origin", to_string(m.origin)}};
}

void to_json(json& j, const WallLayer& layer) {
  j = json{{"material", layer.material},
           {"layer_type", to_string(layer.layer_type)},
           {"thermal_conductivity", layer.thermal_conductivity},
           {"thickness", layer.thickness}};
}

void to_json(json& j, const WallDetailSpec& spec) {
  j = json{{"wall_detail_name", spec.wall_detail_name}, {"layers", spec.layers}};
}

void to_json(json& j, const WallType& type) {
  j = json{{"id", type.id},
           {"spec", type.spec},
           {"created_from", type.created_from ? json(*type.created_from) : json(nullptr)},
           {"revision", type.revision},
           {"compliance", to_string(type.compliance)},
           {"created_in", type.created_in ? json(*type.created_in) : json(nullptr)}};
}

void to_json(json& j, const WallInstance& w) {
  j = json{{"id", w.id},
           {"wall_type", w.wall_type},
           {"baseline",
            {{"start", {{"x", w.baseline.start.x}, {"y", w.baseline.start.y}}},
             {"end", {{"x", w.baseline.end.x}, {"y", w.baseline.end.y}}}}},
           {"height", w.height}};
}

void to_json(json& j, const Project& p) {
  j = json{{"schema_version", p.schema_version},
           {"material_library", p.material_library},
           {"wall_types", p.wall_types},
           {"wall_instances", p.wall_instances},
           {"orientation", {{"x", p.orientation.x}, {"y", p.orientation.y}, {"z", p.orientation.z}}},
           {"next_id", p.next_id}};
}

namespace {

// Path-tracking accessor; every failure names the offending location.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  Reader at(std::string_view key) const {
    auto child_path = path_ + "." + std::string(key);
    if (!node_.is_object()) fail(path_, "expected an object");
    auto it = node_.find(key);
    if (it == node_.end()) fail(child_path, "missing field");
    return Reader(*it, child_path);
  }

  Reader at(std::size_t index) const {
    return Reader(node_.at(index), path_ + "[" + std::to_string(index) + "]");
  }

  std::size_t array_size() const {
    if (!node_.is_array()) fail(path_, "expected an array");
    return node_.size();
  }

  std::string string() const {
    if (!node_.is_string()) fail(path_, "expected a string");
    return node_.get<std::string>();
  }

  std::optional<std::string> optional_string() const {
    if (node_.is_null()) return std::nullopt;
    return string();
  }

  double number() const {
    if (!node_.is_number()) fail(path_, "expected a number");
    return node_.get<double>();
  }

  std::int64_t integer() const {
    if (!node_.is_number_integer()) fail(path_, "expected an integer");
    return node_.get<std::int64_t>();
  }

  template <typename E>
  E enumeration(std::optional<E> (*parse)(std::string_view)) const {
    auto text = string();
    auto parsed = parse(text);
    if (!parsed) fail(path_, "unknown value '" + text + "'");
    return *parsed;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw KernelError(KernelErrc::CorruptFile, path + ": " + what, path);
  }

 private:
  const json& node_;
  std::string path_;
};

Point2 read_point(const Reader& r) { return {r.at("x").number(), r.at("y").number()}; }

WallDetailSpec read_spec(const Reader& r) {
  WallDetailSpec spec;
  spec.wall_detail_name = r.at("wall_detail_name").string();
  auto layers = r.at("layers");
  for (std::size_t i = 0; i < layers.array_size(); ++i) {
    auto l = layers.at(i);
    WallLayer layer;
    layer.material = l.at("material").string();
    layer.layer_type = l.at("layer_type").enumeration(&parse_layer_function);
    layer.thermal_conductivity = l.at("thermal_conductivity").number();
    layer.thickness = l.at("thickness").number();
    spec.layers.push_back(std::move(layer));
  }
  return spec;
}

Project read_project(const Reader& root) {
  Project p;
  p.schema_version = static_cast<int>(root.at("schema_version").integer());
  if (p.schema_version != kSchemaVersion) {
    throw KernelError(KernelErrc::SchemaVersionMismatch,
                      "file has schema_version " + std::to_string(p.schema_version) +
                          ", this build reads " + std::to_string(kSchemaVersion),
                      "$.schema_version");
  }
  auto mats = root.at("material_library");
  for (std::size_t i = 0; i < mats.array_size(); ++i) {
    auto m = mats.at(i);
    Material mat;
    mat.id = m.at("id").string();
    mat.name = m.at("name").string();
    mat.default_layer_type = m.at("default_layer_type").enumeration(&parse_layer_function);
    mat.thermal_conductivity = m.at("thermal_conductivity").number();
    auto aliases = m.at("aliases");
    for (std::size_t k = 0; k < aliases.array_size(); ++k) {
      mat.aliases.push_back(aliases.at(k).string());
    }
    mat.origin = m.at("origin").enumeration(&parse_material_origin);
    p.material_library.push_back(std::move(mat));
  }
  auto types = root.at("wall_types");
  for (std::size_t i = 0; i < types.array_size(); ++i) {
    auto t = types.at(i);
    WallType type;
    type.id = t.at("id").string();
    type.spec = read_spec(t.at("spec"));
    type.created_from = t.at("created_from").optional_string();
    type.revision = t.at("revision").integer();
    type.compliance = t.at("compliance").enumeration(&parse_compliance_state);
    type.created_in = t.at("created_in").optional_string();
    p.wall_types.push_back(std::move(type));
  }
  auto instances = root.at("wall_instances");
  for (std::size_t i = 0; i < instances.array_size(); ++i) {
    auto w = instances.at(i);
    WallInstance inst;
    inst.id = w.at("id").string();
    inst.wall_type = w.at("wall_type").string();
    inst.baseline.start = read_point(w.at("baseline").at("start"));
    inst.baseline.end = read_point(w.at("baseline").at("end"));
    inst.height = w.at("height").number();
    p.wall_instances.push_back(std::move(inst));
  }
  auto o = root.at("orientation");
  p.orientation = {o.at("x").number(), o.at("y").number(), o.at("z").number()};
  p.next_id = root.at("next_id").integer();
  return p;
}

}  // namespace

Project project_from_json(const json& doc) {
  auto project = read_project(Reader(doc, "$"));
  if (auto broken = integrity_violations(project); !broken.empty()) {
    throw KernelError(KernelErrc::CorruptFile, broken.front(), "$");
  }
  return project;
}

WallDetailSpec spec_from_json(const json& doc) { return read_spec(Reader(doc, "$")); }

void save_project(const Project& project, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw KernelError(KernelErrc::IoError, "cannot open '" + tmp + "' for writing");
    }
    out << json(project).dump(2) << '\n';
    if (!out.flush()) throw KernelError(KernelErrc::IoError, "write failed for '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw KernelError(KernelErrc::IoError,
                      "cannot move '" + tmp + "' to '" + path.string() + "': " + ec.message());
  }
}

Project load_project(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KernelError(KernelErrc::IoError, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw KernelError(KernelErrc::CorruptFile, e.what(), "byte " + std::to_string(e.byte));
  }
  return project_from_json(doc);
}

}  // namespace bimflow::kernel
