// Copyright 2026 The disco Authors
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

#include "disco/scenarios.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "json.hpp"

namespace disco {
namespace {

struct Embedded {
  const char* name;
  const char* model;
  const char* sidecar;
};

constexpr Embedded kEmbedded[] = {
#include "embedded_scenarios.inc"
};

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Rational parse_fraction(const std::string& text) {
  Rational r(text);
  r.canonicalize();
  return r;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& e : kEmbedded) out.emplace_back(e.name);
  return out;
}

Scenario builtin(const std::string& name) {
  std::string model_text, sidecar;
  bool found = false;
  if (const char* dir = std::getenv("DISCO_SCENARIO_DIR"); dir && *dir) {
    const std::filesystem::path base(dir);
    auto m = read_file(base / (name + ".dscm"));
    auto j = read_file(base / (name + ".json"));
    found = m || j;
    model_text = m.value_or("");
    sidecar = j.value_or("");
  } else {
    for (const auto& e : kEmbedded)
      if (name == e.name) {
        model_text = e.model;
        sidecar = e.sidecar;
        found = true;
      }
  }
  if (!found) throw ValidationError("unknown scenario '" + name + "'");

  Scenario s;
  s.name = name;
  s.model_text = model_text;
  if (!model_text.empty()) s.model = load_model_text(model_text);
  if (!sidecar.empty()) {
    const auto j = nlohmann::json::parse(sidecar, nullptr, false);
    if (j.is_discarded()) throw ParseError("scenario " + name + ": bad sidecar JSON", 1, 1);
    s.description = j.value("description", std::string());
    if (j.value("continuous", false)) s.continuous = linear_gaussian_default();
    if (j.contains("dataset")) s.dataset = exact_table_dataset(j["dataset"].get<std::string>());
    for (const auto& e : j.value("expected", nlohmann::json::array())) {
      ExpectedValue ev;
      ev.query = e.at("query").get<std::string>();
      ev.mode = parse_coupling(e.value("mode", std::string("disco")));
      if (e.contains("value")) ev.value = parse_fraction(e["value"].get<std::string>());
      if (e.contains("approx")) ev.approx = e["approx"].get<double>();
      s.expected.push_back(std::move(ev));
    }
  }
  if (!s.model && !s.continuous)
    throw ValidationError("scenario '" + name + "' has neither a model nor a sampler");
  return s;
}

Model load_model_or_builtin(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) return load_model(name_or_path);
  Scenario s = builtin(name_or_path);
  if (!s.model) throw ValidationError("scenario '" + name_or_path + "' has no finite model");
  return *s.model;
}

}  // namespace disco
