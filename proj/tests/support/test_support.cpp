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

#include "test_support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include "bimflow/kernel/kernel.hpp"
#include "bimflow/kernel/materials.hpp"

namespace bimflow::testkit {

namespace fs = std::filesystem;
using kernel::LayerFunction;

fs::path test_dir() { return fs::path(BIMFLOW_TEST_DIR); }

fs::path fixture_path(const std::string& name) { return test_dir() / "fixtures" / name; }

nlohmann::json load_fixture_json(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  return nlohmann::json::parse(in);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (;;) {
    auto candidate = fs::temp_directory_path() /
                     (prefix + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directories(candidate)) {
      path_ = candidate;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

kernel::WallLayer layer(std::string material, LayerFunction function, double thickness, double conductivity) {
  return {std::move(material), function, conductivity, thickness};
}

kernel::WallDetailSpec concrete_wall(const std::string& name, double structure_mm) {
  return {name,
          {layer("cement render", LayerFunction::Finish, 20, 0.72),
           layer("reinforced concrete", LayerFunction::Structure, structure_mm, 2.3),
           layer("mineral wool", LayerFunction::Insulation, 100, 0.035)}};
}

kernel::WallDetailSpec timber_wall(const std::string& name, double structure_mm) {
  return {name,
          {layer("fiber cement siding", LayerFunction::Finish, 12, 0.25),
           layer("timber", LayerFunction::Structure, structure_mm, 0.13),
           layer("gypsum wallboard", LayerFunction::Finish, 12.5, 0.25)}};
}

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string fresh_name(Rng& rng) {
  static const std::vector<std::string> stems{"North", "South", "Party", "Core", "Facade", "Basement", "Annex"};
  return pick(rng, stems) + " Wall " + std::to_string(uniform_int(rng, 1, 1'000'000));
}

kernel::Segment2 random_baseline(Rng& rng) {
  kernel::Point2 a{uniform(rng, -50, 50), uniform(rng, -50, 50)};
  kernel::Point2 b{a.x + uniform(rng, 0.5, 20), a.y + uniform(rng, -10, 10)};
  return {a, b};
}

std::vector<std::string> type_ids(const kernel::Project& p) {
  std::vector<std::string> ids;
  for (const auto& t : p.wall_types) ids.push_back(t.id);
  return ids;
}

std::vector<std::string> instance_ids(const kernel::Project& p) {
  std::vector<std::string> ids;
  for (const auto& w : p.wall_instances) ids.push_back(w.id);
  return ids;
}

}  // namespace

kernel::WallDetailSpec random_spec(Rng& rng, const std::vector<kernel::Material>& materials,
                                   const std::string& name) {
  kernel::WallDetailSpec spec;
  spec.wall_detail_name = name;
  const int n = uniform_int(rng, 1, 6);
  for (int i = 0; i < n; ++i) {
    const auto& m = pick(rng, materials);
    // Mix integral and fractional thicknesses so serialization sees both.
    const double thickness = uniform_int(rng, 0, 1) == 0 ? uniform_int(rng, 1, 300) : uniform(rng, 0.1, 300);
    spec.layers.push_back({m.name, m.default_layer_type, m.thermal_conductivity > 0 ? m.thermal_conductivity : 0.1,
                           thickness});
  }
  return spec;
}

kernel::Project random_project(Rng& rng) {
  auto project = kernel::make_seeded_project();
  const int extra_materials = uniform_int(rng, 0, 3);
  for (int i = 0; i < extra_materials; ++i) {
    kernel::Material m;
    m.name = "custom material " + std::to_string(uniform_int(rng, 1, 1'000'000));
    m.default_layer_type = pick(rng, kernel::all_layer_functions());
    m.thermal_conductivity = uniform(rng, 0.01, 3.0);
    m.origin = uniform_int(rng, 0, 1) == 0 ? kernel::MaterialOrigin::User : kernel::MaterialOrigin::Unverified;
    if (uniform_int(rng, 0, 1) == 0) m.aliases.push_back("alias " + std::to_string(i));
    try {
      kernel::add_material(project, m);
    } catch (const kernel::KernelError&) {
    }
  }
  const int ops = uniform_int(rng, 1, 25);
  bool threw = false;
  for (int i = 0; i < ops; ++i) random_operation(rng, project, threw);
  return project;
}

std::string random_operation(Rng& rng, kernel::Project& project, bool& threw) {
  threw = false;
  const int op = uniform_int(rng, 0, 9);
  auto types = type_ids(project);
  auto instances = instance_ids(project);
  // Occasionally aim at ids that do not exist.
  auto some_type = [&]() -> std::string {
    if (types.empty() || uniform_int(rng, 0, 9) == 0) return "wt-missing-" + std::to_string(uniform_int(rng, 1, 9));
    return pick(rng, types);
  };
  auto some_instance = [&]() -> std::string {
    if (instances.empty() || uniform_int(rng, 0, 9) == 0) return "wi-missing";
    return pick(rng, instances);
  };
  auto some_name = [&]() -> std::string {
    if (!project.wall_types.empty() && uniform_int(rng, 0, 4) == 0) {
      return pick(rng, project.wall_types).spec.wall_detail_name;
    }
    return fresh_name(rng);
  };
  auto maybe_broken_spec = [&]() {
    auto spec = random_spec(rng, project.material_library, some_name());
    switch (uniform_int(rng, 0, 7)) {
      case 0: spec.layers.clear(); break;
      case 1: spec.layers.front().thickness = -uniform(rng, 0, 10); break;
      case 2: spec.wall_detail_name = "  "; break;
      case 3: spec.layers.back().material = "unlisted material " + std::to_string(uniform_int(rng, 1, 99)); break;
      default: break;
    }
    return spec;
  };

  std::string label;
  try {
    switch (op) {
      case 0:
      case 1:
        label = "create";
        kernel::create_wall_type(project, maybe_broken_spec());
        break;
      case 2:
        label = "duplicate";
        kernel::duplicate_wall_type(project, some_type(), some_name());
        break;
      case 3:
        label = "modify";
        kernel::modify_wall_type(project, some_type(), maybe_broken_spec());
        break;
      case 4:
        label = "delete";
        kernel::delete_wall_type(project, some_type());
        break;
      case 5: {
        label = "place";
        auto baseline = random_baseline(rng);
        if (uniform_int(rng, 0, 9) == 0) baseline.end = baseline.start;
        kernel::place_wall(project, some_type(), baseline, uniform_int(rng, 0, 9) == 0 ? 0.0 : uniform(rng, 2, 6));
        break;
      }
      case 6:
        label = "replace";
        kernel::replace_wall_type(project, some_instance(), some_type());
        break;
      case 7: {
        label = "apply";
        kernel::ApplyOptions options;
        if (!instances.empty() && uniform_int(rng, 0, 1) == 0) options.target_instance = some_instance();
        if (uniform_int(rng, 0, 1) == 0) options.retry_scope = "scope-" + std::to_string(uniform_int(rng, 1, 3));
        kernel::apply_wall_detail(project, maybe_broken_spec(), options);
        break;
      }
      case 8: {
        label = "rotate";
        static const std::vector<std::string> axes{"X", "Y", "Z", "W"};
        kernel::rotate_model(project, pick(rng, axes), uniform(rng, -720, 720));
        break;
      }
      default: {
        label = "flag";
        static const std::vector<kernel::ComplianceState> states{
            kernel::ComplianceState::Unchecked, kernel::ComplianceState::Compliant,
            kernel::ComplianceState::NonCompliant};
        kernel::set_compliance(project, some_type(), pick(rng, states));
        break;
      }
    }
  } catch (const kernel::KernelError&) {
    threw = true;
  }
  return label;
}

orchestrator::EngineConfig mock_config() {
  orchestrator::EngineConfig config;
  config.backend = orchestrator::EngineConfig::Backend::Mock;
  return config;
}

}  // namespace bimflow::testkit
