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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "disco/expr.hpp"
#include "disco/rational.hpp"
#include "disco/value.hpp"

namespace disco {

using UnitId = std::int64_t;  // 1-based

// An intervention do(v = c, ...). Ordered by variable name, which makes the
// printed form canonical.
using Intervention = std::map<std::string, Value>;

std::string to_string(const Intervention& iv);

struct PmfEntry {
  Value value;
  Rational prob;

  friend bool operator==(const PmfEntry&, const PmfEntry&) = default;
};

// Finite probability mass function over exact values. Construction does not
// validate; `problems()` lists invariant violations.
class FinitePmf {
 public:
  FinitePmf() = default;
  explicit FinitePmf(std::vector<PmfEntry> entries)
      : entries_(std::move(entries)) {}

  static FinitePmf uniform(const std::vector<Value>& values);
  static FinitePmf uniform_range(std::int64_t lo, std::int64_t hi);
  static FinitePmf point(Value v);

  const std::vector<PmfEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool is_point_mass() const;
  // Value with the largest mass; earliest entry on ties.
  Value mode() const;

  std::vector<std::string> problems() const;

  friend bool operator==(const FinitePmf&, const FinitePmf&) = default;

 private:
  std::vector<PmfEntry> entries_;
};

// Units 1..N, each in exactly one named group, with optional weights and an
// optional rational feature table.
class UnitPopulation {
 public:
  UnitPopulation() = default;
  explicit UnitPopulation(std::int64_t count);

  std::int64_t count() const { return count_; }

  // Assigns units lo..hi (inclusive) to `group`, creating it if needed.
  void assign(const std::string& group, std::int64_t lo, std::int64_t hi);
  void set_weights(std::vector<Rational> weights) { weights_ = std::move(weights); }
  void set_features(std::vector<std::string> names,
                    std::vector<std::vector<Value>> rows);

  const std::vector<std::string>& group_names() const { return group_names_; }
  std::optional<std::size_t> group_index(const std::string& name) const;
  // Group of a unit; npos when unassigned.
  std::size_t group_of(UnitId unit) const;
  const std::string& group_name_of(UnitId unit) const;
  std::vector<UnitId> units_in(const std::string& group) const;

  bool has_custom_weights() const { return !weights_.empty(); }
  const std::vector<Rational>& raw_weights() const { return weights_; }
  Rational weight(UnitId unit) const;

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::vector<Value>>& feature_rows() const { return features_; }
  std::span<const Value> features(UnitId unit) const;

  std::vector<std::string> problems() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const UnitPopulation&, const UnitPopulation&) = default;

 private:
  std::int64_t count_ = 0;
  std::vector<std::string> group_names_;
  std::vector<std::size_t> unit_group_;  // per unit, npos if unassigned
  std::vector<std::size_t> assignment_count_;
  std::vector<Rational> weights_;
  std::vector<std::string> feature_names_;
  std::vector<std::vector<Value>> features_;
};

struct NoiseDecl {
  std::string name;
  FinitePmf pmf;

  friend bool operator==(const NoiseDecl&, const NoiseDecl&) = default;
};

struct VariableDecl {
  std::string name;
  std::vector<Value> domain;

  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

// Group name used for the body that applies to every group without its own.
inline constexpr const char* kDefaultGroup = "*";

// Group holding every unit of a model file that declares no groups.
inline constexpr const char* kImplicitGroup = "all";

struct StructuralEquation {
  std::string target;
  std::vector<std::string> parents;
  std::vector<std::string> noises;
  // (group name or "*", body), in declaration order.
  std::vector<std::pair<std::string, Expr>> bodies;

  // Body used for `group`, falling back to the default body.
  const Expr* body_for(const std::string& group) const;

  friend bool operator==(const StructuralEquation&,
                         const StructuralEquation&) = default;
};

enum class Coupling { Disco, Scm };

std::string to_string(Coupling c);
Coupling parse_coupling(const std::string& text);

struct Model {
  UnitPopulation population;
  std::vector<NoiseDecl> noises;
  std::vector<VariableDecl> variables;
  std::vector<StructuralEquation> equations;
  Coupling coupling = Coupling::Disco;

  const VariableDecl* find_variable(const std::string& name) const;
  const NoiseDecl* find_noise(const std::string& name) const;
  const StructuralEquation* find_equation(const std::string& target) const;
  Model with_coupling(Coupling c) const;

  friend bool operator==(const Model&, const Model&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate_model(const Model& model);

// Throws ValidationError carrying the report summary when invalid.
void require_valid(const Model& model);

// Parents before children; ties broken by declaration order. Throws
// ValidationError naming a cycle.
std::vector<std::string> topological_order(const Model& model);

// Evaluates every equation in topological order. Throws ValidationError for
// missing/out-of-domain noise values and DomainError when a body leaves its
// target's domain.
std::map<std::string, Value> solve(const Model& model, UnitId unit,
                                   const std::map<std::string, Value>& noise);

// Noise name used for `noise` inside the world created by `iv` in disco
// coupling, e.g. "E[T=1]" or "E[]".
std::string counterfactual_noise_name(const std::string& noise,
                                      const Intervention& iv);

// Submodel for do(iv). In disco coupling every noise is replaced by a fresh
// copy with the same pmf; in scm coupling the noises are kept.
Model apply_do(const Model& model, const Intervention& iv);

}  // namespace disco
