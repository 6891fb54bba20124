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

#include <gtest/gtest.h>

#include <fstream>

#include "bimflow/kernel/kernel.hpp"
#include "bimflow/kernel/materials.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "test_support.hpp"

using namespace bimflow;
using namespace bimflow::kernel;
using bimflow::testkit::concrete_wall;
using bimflow::testkit::layer;
using bimflow::testkit::TempDir;

namespace {

KernelErrc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const KernelError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a KernelError";
  return KernelErrc::IoError;
}

Segment2 line(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y1}}; }

}  // namespace

TEST(KernelTypes, EnumRoundTrips) {
  for (auto f : all_layer_functions()) EXPECT_EQ(parse_layer_function(to_string(f)), f);
  EXPECT_EQ(parse_layer_function("structure"), LayerFunction::Structure);
  EXPECT_EQ(parse_layer_function("INSULATION"), LayerFunction::Insulation);
  EXPECT_FALSE(parse_layer_function("Cladding").has_value());
  EXPECT_EQ(parse_compliance_state(to_string(ComplianceState::NonCompliant)), ComplianceState::NonCompliant);
  EXPECT_EQ(parse_material_origin(to_string(MaterialOrigin::Unverified)), MaterialOrigin::Unverified);
}

TEST(KernelTypes, ApproxEqualUsesThicknessTolerance) {
  auto a = concrete_wall("A");
  auto b = a;
  b.layers[1].thickness += 5e-7;
  EXPECT_TRUE(approx_equal(a, b));
  b.layers[1].thickness += 1e-5;
  EXPECT_FALSE(approx_equal(a, b));
  b = a;
  b.layers.pop_back();
  EXPECT_FALSE(approx_equal(a, b));
}

TEST(KernelMaterials, SeedLibraryIsConsistent) {
  auto p = make_seeded_project();
  EXPECT_GE(p.material_library.size(), 20u);
  EXPECT_TRUE(integrity_violations(p).empty());
  ASSERT_NE(p.find_material("Reinforced-Concrete"), nullptr);
  EXPECT_EQ(p.find_material("reinforced concrete")->default_layer_type, LayerFunction::Structure);
  EXPECT_EQ(p.find_material("unobtainium"), nullptr);
}

TEST(KernelMaterials, AddMaterialRejectsDuplicatesAndBadValues) {
  auto p = make_seeded_project();
  Material m{"", "Hempcrete", LayerFunction::Insulation, 0.07, {}, MaterialOrigin::User};
  const auto id = add_material(p, m);
  EXPECT_EQ(p.find_material("hempcrete")->id, id);
  EXPECT_EQ(error_of([&] { add_material(p, m); }), KernelErrc::DuplicateName);
  m.name = "   ";
  EXPECT_EQ(error_of([&] { add_material(p, m); }), KernelErrc::InvalidSpec);
  m.name = "Cork";
  m.thermal_conductivity = 0;
  EXPECT_EQ(error_of([&] { add_material(p, m); }), KernelErrc::InvalidSpec);
}

TEST(KernelCreate, AddsWallType) {
  auto p = make_seeded_project();
  const auto id = create_wall_type(p, concrete_wall("RC Exterior Wall"));
  EXPECT_EQ(p.wall_types.size(), 1u);
  ASSERT_NE(p.find_wall_type(id), nullptr);
  EXPECT_EQ(p.find_wall_type(id)->revision, 1);
  EXPECT_EQ(p.find_wall_type(id)->compliance, ComplianceState::Unchecked);
}

TEST(KernelCreate, EmptyLayersIsInvalid) {
  auto p = make_seeded_project();
  WallDetailSpec spec{"Nothing", {}};
  try {
    create_wall_type(p, spec);
    FAIL();
  } catch (const KernelError& e) {
    EXPECT_EQ(e.code(), KernelErrc::InvalidSpec);
    EXPECT_EQ(e.location(), "layers");
  }
  EXPECT_TRUE(p.wall_types.empty());
}

TEST(KernelCreate, DuplicateNameRejected) {
  auto p = make_seeded_project();
  create_wall_type(p, concrete_wall("RC Exterior Wall"));
  const auto before = p;
  EXPECT_EQ(error_of([&] { create_wall_type(p, concrete_wall("RC Exterior Wall")); }), KernelErrc::DuplicateName);
  EXPECT_EQ(error_of([&] { create_wall_type(p, concrete_wall("rc   exterior-wall")); }), KernelErrc::DuplicateName);
  EXPECT_EQ(p, before);
}

TEST(KernelCreate, UnknownMaterialBecomesUnverified) {
  auto p = make_seeded_project();
  auto spec = concrete_wall("Odd");
  spec.layers.push_back(layer("aerogel blanket", LayerFunction::Insulation, 10, 0.015));
  create_wall_type(p, spec);
  const auto* m = p.find_material("aerogel blanket");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->origin, MaterialOrigin::Unverified);
  EXPECT_TRUE(integrity_violations(p).empty());
}

TEST(KernelCreate, LayerMaterialsTakeLibrarySpelling) {
  auto p = make_seeded_project();
  auto spec = concrete_wall("Spelling");
  spec.layers[1].material = "Reinforced  Concrete";
  const auto id = create_wall_type(p, spec);
  EXPECT_EQ(p.find_wall_type(id)->spec.layers[1].material, "reinforced concrete");
}

TEST(KernelDuplicate, CopiesLayersWithNewId) {
  auto p = make_seeded_project();
  const auto src = create_wall_type(p, concrete_wall("Source"));
  const auto copy = duplicate_wall_type(p, src, "Copy");
  EXPECT_NE(copy, src);
  EXPECT_EQ(p.find_wall_type(copy)->spec.layers, p.find_wall_type(src)->spec.layers);
  EXPECT_EQ(p.find_wall_type(copy)->created_from, src);
}

TEST(KernelDuplicate, UnknownSourceNotFound) {
  auto p = make_seeded_project();
  EXPECT_EQ(error_of([&] { duplicate_wall_type(p, "wt-404", "X"); }), KernelErrc::NotFound);
}

TEST(KernelDuplicate, CopyIsIsolatedFromSource) {
  auto p = make_seeded_project();
  const auto src = create_wall_type(p, concrete_wall("Source", 150));
  const auto copy = duplicate_wall_type(p, src, "Copy");
  auto spec = p.find_wall_type(copy)->spec;
  spec.layers[1].thickness = 190;
  modify_wall_type(p, copy, spec);
  EXPECT_EQ(p.find_wall_type(src)->spec.layers[1].thickness, 150);
  EXPECT_EQ(p.find_wall_type(copy)->spec.layers[1].thickness, 190);
}

TEST(KernelModify, BumpsRevision) {
  auto p = make_seeded_project();
  const auto id = create_wall_type(p, concrete_wall("W", 150));
  auto spec = p.find_wall_type(id)->spec;
  spec.layers[1].thickness = 190;
  const auto& t = modify_wall_type(p, id, spec);
  EXPECT_EQ(t.revision, 2);
  EXPECT_EQ(t.spec.layers[1].thickness, 190);
}

TEST(KernelModify, NegativeThicknessLeavesRevision) {
  auto p = make_seeded_project();
  const auto id = create_wall_type(p, concrete_wall("W", 150));
  auto spec = p.find_wall_type(id)->spec;
  spec.layers[0].thickness = -3;
  try {
    modify_wall_type(p, id, spec);
    FAIL();
  } catch (const KernelError& e) {
    EXPECT_EQ(e.code(), KernelErrc::InvalidSpec);
    EXPECT_EQ(e.location(), "layers[0].thickness");
  }
  EXPECT_EQ(p.find_wall_type(id)->revision, 1);
}

TEST(KernelModify, RenameToTakenNameRejected) {
  auto p = make_seeded_project();
  create_wall_type(p, concrete_wall("A"));
  const auto b = create_wall_type(p, concrete_wall("B"));
  EXPECT_EQ(error_of([&] { modify_wall_type(p, b, concrete_wall("A")); }), KernelErrc::DuplicateName);
  // Keeping its own name is fine.
  EXPECT_NO_THROW(modify_wall_type(p, b, concrete_wall("B", 250)));
}

TEST(KernelDelete, Lifecycle) {
  auto p = make_seeded_project();
  const auto free_type = create_wall_type(p, concrete_wall("Free"));
  const auto used_type = create_wall_type(p, concrete_wall("Used"));
  const auto wall = place_wall(p, used_type, line(0, 0, 5, 0), 3.0);

  delete_wall_type(p, free_type);
  EXPECT_EQ(p.find_wall_type(free_type), nullptr);
  EXPECT_EQ(error_of([&] { delete_wall_type(p, free_type); }), KernelErrc::NotFound);
  try {
    delete_wall_type(p, used_type);
    FAIL();
  } catch (const KernelError& e) {
    EXPECT_EQ(e.code(), KernelErrc::InUse);
    EXPECT_EQ(e.ids(), std::vector<std::string>{wall});
  }
}

TEST(KernelPlace, Geometry) {
  auto p = make_seeded_project();
  const auto t = create_wall_type(p, concrete_wall("T"));
  const auto id = place_wall(p, t, line(0, 0, 5, 0), 3.0);
  ASSERT_NE(p.find_instance(id), nullptr);
  EXPECT_EQ(p.find_instance(id)->wall_type, t);
  EXPECT_EQ(error_of([&] { place_wall(p, t, line(1, 1, 1, 1), 3.0); }), KernelErrc::InvalidGeometry);
  EXPECT_EQ(error_of([&] { place_wall(p, t, line(0, 0, 5, 0), 0.0); }), KernelErrc::InvalidGeometry);
  EXPECT_EQ(error_of([&] { place_wall(p, "wt-0", line(0, 0, 5, 0), 3.0); }), KernelErrc::NotFound);
  EXPECT_EQ(p.wall_instances.size(), 1u);
}

TEST(KernelReplace, RepointsInstance) {
  auto p = make_seeded_project();
  const auto generic = create_wall_type(p, WallDetailSpec{"Generic 200", {layer("reinforced concrete", LayerFunction::Structure, 200)}});
  const auto detailed = create_wall_type(p, concrete_wall("Detailed"));
  const auto w = place_wall(p, generic, line(0, 0, 4, 3), 2.7);
  const auto baseline = p.find_instance(w)->baseline;
  replace_wall_type(p, w, detailed);
  EXPECT_EQ(p.find_instance(w)->wall_type, detailed);
  EXPECT_EQ(p.find_instance(w)->baseline, baseline);
  const auto before = p;
  replace_wall_type(p, w, detailed);
  EXPECT_EQ(p, before);
  EXPECT_EQ(error_of([&] { replace_wall_type(p, "wi-404", detailed); }), KernelErrc::NotFound);
}

TEST(KernelThickness, Sums) {
  auto spec = [](std::vector<double> t) {
    WallDetailSpec s{"S", {}};
    for (double v : t) s.layers.push_back(layer("plaster", LayerFunction::Finish, v));
    return s;
  };
  EXPECT_EQ(total_thickness(spec({20, 120, 50})), 190.0);
  EXPECT_EQ(total_thickness(spec({140})), 140.0);
  EXPECT_EQ(total_thickness(spec({12.5, 140, 12.5})), 165.0);
}

TEST(KernelApply, CreatesTypeWithoutTarget) {
  auto p = make_seeded_project();
  auto r = apply_wall_detail(p, concrete_wall("Reinforced Concrete Exterior Insulated Wall 140 mm", 140));
  ASSERT_EQ(r.mutated_ids.size(), 1u);
  EXPECT_NE(p.find_wall_type(r.mutated_ids[0]), nullptr);
  EXPECT_EQ(r.produced_spec.layers[1].thickness, 140);
  EXPECT_NE(r.summary.find("Created"), std::string::npos);
}

TEST(KernelApply, SameScopeUpdatesInPlace) {
  auto p = make_seeded_project();
  ApplyOptions opts;
  opts.retry_scope = "s-1#1";
  auto first = apply_wall_detail(p, concrete_wall("Retry Wall", 90), opts);
  auto second = apply_wall_detail(p, concrete_wall("Retry Wall", 150), opts);
  EXPECT_EQ(first.mutated_ids, second.mutated_ids);
  EXPECT_EQ(p.find_wall_type(first.mutated_ids[0])->revision, 2);
  EXPECT_EQ(p.wall_types.size(), 1u);
  // Another scope may not overwrite it.
  opts.retry_scope = "s-1#2";
  EXPECT_EQ(error_of([&] { apply_wall_detail(p, concrete_wall("Retry Wall"), opts); }), KernelErrc::DuplicateName);
}

TEST(KernelApply, TargetInstanceMutatesBoth) {
  auto p = make_seeded_project();
  const auto generic = create_wall_type(p, concrete_wall("Generic"));
  const auto w = place_wall(p, generic, line(0, 0, 5, 0), 3.0);
  ApplyOptions opts;
  opts.target_instance = w;
  auto r = apply_wall_detail(p, concrete_wall("Detailed"), opts);
  ASSERT_EQ(r.mutated_ids.size(), 2u);
  EXPECT_EQ(r.mutated_ids[1], w);
  EXPECT_EQ(p.find_instance(w)->wall_type, r.mutated_ids[0]);
  opts.target_instance = "wi-404";
  const auto before = p;
  EXPECT_EQ(error_of([&] { apply_wall_detail(p, concrete_wall("Other"), opts); }), KernelErrc::NotFound);
  EXPECT_EQ(p, before);
}

TEST(KernelRotate, AccumulatesModulo360) {
  auto p = make_seeded_project();
  rotate_model(p, "X", 90);
  rotate_model(p, "x", 300);
  EXPECT_DOUBLE_EQ(p.orientation.x, 30);
  rotate_model(p, "Z", -90);
  EXPECT_DOUBLE_EQ(p.orientation.z, 270);
  EXPECT_EQ(error_of([&] { rotate_model(p, "Q", 10); }), KernelErrc::InvalidGeometry);
}

TEST(KernelPersistence, SeededRoundTrip) {
  TempDir dir;
  auto p = make_seeded_project();
  create_wall_type(p, concrete_wall("A"));
  save_project(p, dir / "p.json");
  EXPECT_EQ(load_project(dir / "p.json"), p);
}

TEST(KernelPersistence, SchemaVersionMismatch) {
  TempDir dir;
  auto doc = nlohmann::json(make_seeded_project());
  doc["schema_version"] = 99;
  std::ofstream(dir / "p.json") << doc.dump();
  EXPECT_EQ(error_of([&] { load_project(dir / "p.json"); }), KernelErrc::SchemaVersionMismatch);
}

TEST(KernelPersistence, TruncatedFileIsCorrupt) {
  TempDir dir;
  const auto text = nlohmann::json(make_seeded_project()).dump();
  std::ofstream(dir / "p.json") << text.substr(0, text.size() / 2);
  EXPECT_EQ(error_of([&] { load_project(dir / "p.json"); }), KernelErrc::CorruptFile);
}

TEST(KernelPersistence, MissingFieldNamesPath) {
  auto doc = nlohmann::json(make_seeded_project());
  doc["material_library"][2].erase("name");
  try {
    project_from_json(doc);
    FAIL();
  } catch (const KernelError& e) {
    EXPECT_EQ(e.code(), KernelErrc::CorruptFile);
    EXPECT_EQ(e.location(), "$.material_library[2].name");
  }
}

TEST(KernelPersistence, DanglingReferenceIsCorrupt) {
  auto p = make_seeded_project();
  const auto t = create_wall_type(p, concrete_wall("A"));
  place_wall(p, t, line(0, 0, 1, 0), 3);
  auto doc = nlohmann::json(p);
  doc["wall_instances"][0]["wall_type"] = "wt-999";
  EXPECT_EQ(error_of([&] { project_from_json(doc); }), KernelErrc::CorruptFile);
}

TEST(KernelPersistence, MissingFileIsIoError) {
  TempDir dir;
  EXPECT_EQ(error_of([&] { load_project(dir / "absent.json"); }), KernelErrc::IoError);
}

TEST(KernelProperty, RandomProjectsRoundTrip) {
  TempDir dir;
  testkit::Rng rng(20240611);
  for (int i = 0; i < 100; ++i) {
    const auto p = testkit::random_project(rng);
    const auto path = dir / ("p" + std::to_string(i) + ".json");
    save_project(p, path);
    ASSERT_EQ(load_project(path), p) << "project " << i;
  }
}

TEST(KernelProperty, RandomOperationsKeepIntegrityAndAtomicity) {
  testkit::Rng rng(777);
  for (int seq = 0; seq < 1000; ++seq) {
    auto p = make_seeded_project();
    const int length = std::uniform_int_distribution<int>(5, 30)(rng);
    for (int k = 0; k < length; ++k) {
      const auto before = p;
      bool threw = false;
      const auto label = testkit::random_operation(rng, p, threw);
      if (threw) {
        ASSERT_EQ(p, before) << "failed " << label << " mutated the project";
      }
      const auto broken = integrity_violations(p);
      ASSERT_TRUE(broken.empty()) << "sequence " << seq << " step " << k << " (" << label << "): " << broken.front();
    }
  }
}
