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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disco/model.hpp"

namespace disco {

// The world a variable is read in: the factual world, or the counterfactual
// world created by do(intervention). The empty intervention is a
// counterfactual world of its own (Y^d), distinct from the factual one.
class WorldRef {
 public:
  WorldRef() = default;  // factual
  static WorldRef factual() { return WorldRef(); }
  static WorldRef counterfactual(Intervention iv) {
    WorldRef w;
    w.intervention_ = std::move(iv);
    return w;
  }

  bool is_factual() const { return !intervention_.has_value(); }
  // Precondition: !is_factual().
  const Intervention& intervention() const { return *intervention_; }

  // "" for the factual world, otherwise "[T=1]" or "[]".
  std::string tag() const;

  friend bool operator==(const WorldRef&, const WorldRef&) = default;
  friend std::strong_ordering operator<=>(const WorldRef& a, const WorldRef& b);

 private:
  std::optional<Intervention> intervention_;
};

// `variable` read in `world` takes one of `values` (sorted, distinct).
struct Event {
  WorldRef world;
  std::string variable;
  std::vector<Value> values;

  static Event equals(std::string variable, Value v, WorldRef world = {}) {
    return Event{std::move(world), std::move(variable), {v}};
  }

  std::string to_string() const;

  friend bool operator==(const Event&, const Event&) = default;
  friend std::strong_ordering operator<=>(const Event& a, const Event& b);
};

struct UnitRestriction {
  enum class Kind { Unit, Group };
  Kind kind = Kind::Unit;
  UnitId unit = 0;
  std::string group;

  std::string to_string() const;
  friend bool operator==(const UnitRestriction&, const UnitRestriction&) = default;
};

struct Query {
  enum class Kind { Probability, Expectation };

  Kind kind = Kind::Probability;
  std::vector<Event> targets;    // Probability: conjunction
  WorldRef expectation_world;    // Expectation target
  std::string expectation_variable;
  std::vector<Event> evidence;   // factual world only
  std::optional<UnitRestriction> restriction;

  static Query probability(std::vector<Event> targets, std::vector<Event> evidence = {});
  static Query expectation(std::string variable, WorldRef world,
                           std::vector<Event> evidence = {});

  // Distinct counterfactual worlds referenced by the target, sorted.
  std::vector<WorldRef> counterfactual_worlds() const;
  bool references_factual_world() const;

  friend bool operator==(const Query&, const Query&) = default;
};

// Grammar:
//   query   := 'P' '(' events ('|' events)? (';' unitref)? ')'
//            | 'E' '[' worldvar ('|' events)? (';' unitref)? ']'
//   events  := event (',' event)*
//   event   := worldvar ('=' value | 'in' '{' value (',' value)* '}')
//   worldvar:= VAR ('[' (VAR '=' value (',' VAR '=' value)*)? ']')?
//   unitref := 'unit' '=' INT | 'group' '=' NAME
//   value   := '-'? NUMBER ('/' NUMBER)?
// Evidence must be factual. Throws ParseError with the column.
Query parse_query(std::string_view text);

// Canonical text with events sorted; parse_query(to_string(q)) == canonical(q).
std::string to_string(const Query& query);
Query canonical(Query query);

ValidationReport validate_query(const Query& query, const Model& model);

}  // namespace disco
