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

#include "disco/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "disco/error.hpp"
#include "json.hpp"

namespace disco {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::size_t Dataset::column(const std::string& name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) throw ValidationError("dataset has no column " + name);
  return static_cast<std::size_t>(it - variables.begin());
}

std::vector<std::string> Dataset::problems(const Model& model) const {
  std::vector<std::string> out;
  std::vector<const VariableDecl*> decls;
  for (const auto& v : variables) {
    decls.push_back(model.find_variable(v));
    if (!decls.back()) out.push_back("column " + v + " is not a model variable");
  }
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.unit < 1 || rec.unit > model.population.count())
      out.push_back("record " + std::to_string(r + 1) + ": unit outside population");
    if (rec.values.size() != variables.size()) {
      out.push_back("record " + std::to_string(r + 1) + ": wrong width");
      continue;
    }
    for (std::size_t c = 0; c < variables.size(); ++c)
      if (decls[c] && std::find(decls[c]->domain.begin(), decls[c]->domain.end(),
                                rec.values[c]) == decls[c]->domain.end())
        out.push_back("record " + std::to_string(r + 1) + ": " + variables[c] + "=" +
                      rec.values[c].to_string() + " outside domain");
  }
  return out;
}

void write_csv(const Dataset& data, std::ostream& out) {
  out << "unit";
  for (const auto& v : data.variables) out << ',' << v;
  out << '\n';
  for (const auto& rec : data.records) {
    out << rec.unit;
    for (const auto& v : rec.values) out << ',' << v.to_csv_string();
    out << '\n';
  }
}

Dataset read_csv(std::istream& in) {
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset", 1, 1);
  auto header = split_csv(line);
  if (header.empty() || header.front() != "unit")
    throw ParseError("dataset header must start with 'unit'", 1, 1);
  data.variables.assign(header.begin() + 1, header.end());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells", line_no, 1);
    Record rec;
    Value unit;
    if (!Value::try_parse(cells[0], unit) || !unit.is_integer())
      throw ParseError("bad unit id '" + cells[0] + "'", line_no, 1);
    rec.unit = unit.num();
    for (std::size_t c = 1; c < cells.size(); ++c) {
      Value v;
      if (!Value::try_parse(cells[c], v))
        throw ParseError("bad value '" + cells[c] + "'", line_no, static_cast<int>(c + 1));
      rec.values.push_back(v);
    }
    data.records.push_back(std::move(rec));
  }
  data.provenance.n = static_cast<std::int64_t>(data.records.size());
  return data;
}

std::string provenance_json(const Provenance& p) {
  nlohmann::ordered_json j;
  if (p.seed)
    j["seed"] = *p.seed;
  else
    j["seed"] = nullptr;
  j["n"] = p.n;
  j["model"] = p.model;
  j["provenance"] = p.kind == Provenance::Kind::Exact ? "exact" : "sampled";
  return j.dump();
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw Error("cannot write " + path.string());
  write_csv(data, csv);
  std::ofstream side(path.string() + ".json", std::ios::binary);
  if (!side) throw Error("cannot write " + path.string() + ".json");
  side << provenance_json(data.provenance) << '\n';
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream csv(path, std::ios::binary);
  if (!csv) throw Error("cannot read " + path.string());
  Dataset data = read_csv(csv);
  std::ifstream side(path.string() + ".json");
  if (side) {
    const auto j = nlohmann::json::parse(side, nullptr, false);
    if (j.is_discarded()) throw ParseError("bad dataset sidecar JSON", 1, 1);
    if (j.contains("seed") && j["seed"].is_number_unsigned())
      data.provenance.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("model") && j["model"].is_string())
      data.provenance.model = j["model"].get<std::string>();
    if (j.value("provenance", std::string()) == "exact")
      data.provenance.kind = Provenance::Kind::Exact;
  }
  return data;
}

}  // namespace disco
