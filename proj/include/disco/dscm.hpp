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

#include <filesystem>
#include <string>
#include <string_view>

#include "disco/model.hpp"

namespace disco {

// Reader and writer for the sectioned `.dscm` model format. The grammar is
// documented in README.md.
//
// Group-dependent noise laws (`group G: pmf ...` inside a noise section)
// are desugared on load into a single unit-independent uniform noise plus a
// per-group threshold inside the consuming equation.

// Parses without validating. Throws ParseError with line and column.
Model parse_model(std::string_view text);

// Canonical text; parse_model(format_model(m)) == m for every valid m.
std::string format_model(const Model& model);

// Parses and validates; throws ParseError or ValidationError.
Model load_model(const std::filesystem::path& path);
Model load_model_text(std::string_view text);

void save_model(const Model& model, const std::filesystem::path& path);

}  // namespace disco
