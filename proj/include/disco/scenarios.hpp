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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disco/dataset.hpp"
#include "disco/model.hpp"
#include "disco/sampling.hpp"

namespace disco {

// A query with its reference value in one coupling mode. Exact entries carry
// `value`; Monte-Carlo-only scenarios carry `approx`.
struct ExpectedValue {
  std::string query;
  Coupling mode = Coupling::Disco;
  std::optional<Rational> value;
  std::optional<double> approx;
};

struct Scenario {
  std::string name;
  std::string description;
  std::string model_text;              // empty for continuous scenarios
  std::optional<Model> model;
  std::optional<Dataset> dataset;
  std::optional<LinearGaussianModel> continuous;
  std::vector<ExpectedValue> expected;
};

std::vector<std::string> builtin_names();

// Reads <name>.dscm and <name>.json from $DISCO_SCENARIO_DIR when set,
// otherwise from the copies compiled into the library. Throws
// ValidationError for an unknown name.
Scenario builtin(const std::string& name);

// A builtin name or a path to a .dscm file.
Model load_model_or_builtin(const std::string& name_or_path);

}  // namespace disco
