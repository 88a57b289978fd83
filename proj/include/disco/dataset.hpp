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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "disco/model.hpp"

namespace disco {

struct Record {
  UnitId unit = 0;
  std::vector<Value> values;  // aligned with Dataset::variables

  friend bool operator==(const Record&, const Record&) = default;
};

struct Provenance {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Sampled;
  std::string model;                 // scenario name or model path
  std::optional<std::uint64_t> seed;  // Sampled only
  std::int64_t n = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Dataset {
  std::vector<std::string> variables;
  std::vector<Record> records;
  Provenance provenance;

  // Column of a variable; throws ValidationError when absent.
  std::size_t column(const std::string& name) const;
  // Checks the record invariants against a model (domains, unit range).
  std::vector<std::string> problems(const Model& model) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// CSV with header `unit,<var>,...`; values via Value::to_csv_string.
void write_csv(const Dataset& data, std::ostream& out);
Dataset read_csv(std::istream& in);

// `path` gets the CSV; `path` + ".json" gets {"seed", "n", "model"}.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
// Reads the sidecar when present.
Dataset load_dataset(const std::filesystem::path& path);

std::string provenance_json(const Provenance& p);

}  // namespace disco
