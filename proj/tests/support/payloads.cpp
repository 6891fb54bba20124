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

#include "payloads.hpp"

#include <random>

#include <nlohmann/json.hpp>

#include "bimflow/kernel/kernel.hpp"
#include "bimflow/kernel/persistence.hpp"
#include "bimflow/util/text.hpp"

namespace bimflow::testkit {

using nlohmann::json;

// Random structuring reply, mostly valid, with one or more local defects.
std::string random_payload(testkit::Rng& rng, const std::vector<kernel::Material>& library) {
  std::uniform_int_distribution<int> die(0, 99);
  auto chance = [&](int percent) { return die(rng) < percent; };
  auto spec = testkit::random_spec(rng, library, "Generated Wall " + std::to_string(die(rng)));
  json doc = spec;
  auto& layers = doc["layers"];
  const int defects = chance(45) ? 0 : 1 + die(rng) % 3;
  for (int d = 0; d < defects; ++d) {
    auto& layer = layers[static_cast<std::size_t>(die(rng)) % layers.size()];
    static const char* keys[] = {"material", "layer_type", "thermal_conductivity", "thickness"};
    const std::string key = keys[die(rng) % 4];
    switch (die(rng) % 14) {
      case 0: layer.erase(key); break;
      case 1: layer["thickness"] = std::to_string(die(rng) + 1) + " mm"; break;
      case 2: layer["thermal_conductivity"] = "0.5 W/mK"; break;
      case 3: layer["thickness"] = chance(50) ? 0.0 : -static_cast<double>(die(rng) + 1); break;
      case 4: layer["thermal_conductivity"] = chance(50) ? 0.0 : -0.2; break;
      case 5: layer["layer_type"] = chance(50) ? "Cladding" : "structural"; break;
      case 6: layer["layer_type"] = chance(50) ? json(3) : json(nullptr); break;
      case 7: layer[key] = chance(50) ? json(true) : json::array(); break;
      case 8: layer["material"] = chance(50) ? "   " : "?!"; break;
      case 9: doc["wall_detail_name"] = chance(30) ? json(42) : json(chance(50) ? "" : "--"); break;
      case 10: doc.erase("wall_detail_name"); break;
      case 11: doc["layers"] = chance(50) ? json::array() : json("none"); return doc.dump();
      case 12: layer["layer_type"] = chance(50) ? "insulation" : "FINISH"; break;
      default: layer["notes"] = "extra key"; break;
    }
  }
  auto text = doc.dump();
  const int wrapper = die(rng);
  if (wrapper < 5) return text.substr(0, text.size() / 2);
  if (wrapper < 15) return "```json\n" + text + "\n```";
  if (wrapper < 20) return "Here you go: " + text;
  if (wrapper < 22) return "[" + text + "]";
  return text;
}

bool kernel_accepts(const std::string& raw, const kernel::Project& seeded) {
  json doc = json::parse(util::extract_json_text(raw), nullptr, false);
  if (doc.is_discarded()) return false;
  try {
    auto spec = kernel::spec_from_json(doc);
    auto project = seeded;
    kernel::apply_wall_detail(project, spec);
    return true;
  } catch (const kernel::KernelError&) {
    return false;
  }
}

}  // namespace bimflow::testkit
