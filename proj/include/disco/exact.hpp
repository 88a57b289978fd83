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

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "disco/compiled.hpp"
#include "disco/model.hpp"
#include "disco/query.hpp"
#include "disco/rational.hpp"

namespace disco {

// P(u | evidence), indexed by unit id.
class UnitPosterior {
 public:
  UnitPosterior() = default;
  explicit UnitPosterior(std::vector<Rational> mass) : mass_(std::move(mass)) {}

  const Rational& operator[](UnitId unit) const {
    return mass_[static_cast<std::size_t>(unit - 1)];
  }
  std::int64_t size() const { return static_cast<std::int64_t>(mass_.size()); }
  const std::vector<Rational>& masses() const { return mass_; }
  Rational total(const std::vector<UnitId>& units) const;

 private:
  std::vector<Rational> mass_;
};

// Exact evaluation by enumeration of noise assignments, unit by unit.
//
// Every world (factual, or do(iv) for some intervention) is solved with the
// same noise slots; the coupling only decides how worlds are combined. In
// disco coupling the worlds of one query are mutually independent given the
// unit, and each counterfactual world is independent of the factual one. In
// scm coupling all worlds read one shared noise assignment.
//
// Per-world laws are cached per unit class, so an engine should be reused
// across queries on one model. Not thread-safe.
class ExactEngine {
 public:
  // Throws ValidationError for an invalid model.
  explicit ExactEngine(Model model);
  virtual ~ExactEngine() = default;

  const Model& model() const { return base_.model(); }
  Coupling coupling() const { return base_.model().coupling; }
  const CompiledModel& compiled() const { return base_; }

  // P(outcome | condition; u) in the factual world.
  virtual Rational layer1(UnitId unit, const Event& outcome,
                          const std::vector<Event>& condition);
  // P(outcome in do(iv); u). The world of `outcome` is ignored.
  virtual Rational layer2(UnitId unit, const Intervention& iv, const Event& outcome);
  // E[var in do(iv); u].
  Rational expectation(UnitId unit, const Intervention& iv, const std::string& var);

  // Individual valuation of a probability or expectation query, given the
  // unit. The query's unit restriction is ignored.
  virtual Rational individual(UnitId unit, const Query& query);

  // P(u | evidence), restricted to the given units/group when set.
  UnitPosterior abduce(const std::vector<Event>& evidence,
                       const std::optional<UnitRestriction>& restriction = {});

  // Σ_u P(u|e) · individual(u, query).
  Rational population(const Query& query);

  // Probability mass that the factual world satisfies all `events` for the
  // unit, i.e. P(events; u).
  Rational factual_mass(UnitId unit, const std::vector<Event>& events);

  // Units of the population, grouped by unit class (first unit represents).
  const std::vector<std::vector<UnitId>>& unit_classes() const { return classes_; }

 private:
  struct Law {
    std::size_t width = 0;  // variables per world
    std::vector<std::vector<Value>> rows;
    std::vector<Rational> probs;
  };

  const CompiledModel& world(const WorldRef& w);
  const Law& law(const std::vector<WorldRef>& worlds, UnitId unit);
  Rational mass(const Law& law, const std::vector<std::pair<std::size_t, const Event*>>& events);
  Rational weighted_sum(const Law& law, std::size_t slot,
                        const std::vector<std::pair<std::size_t, const Event*>>& events);
  std::size_t slot(const Event& e, std::size_t world_pos) const;

  CompiledModel base_;
  std::map<WorldRef, std::unique_ptr<CompiledModel>> worlds_;
  std::map<std::pair<std::vector<WorldRef>, std::size_t>, Law> laws_;
  std::vector<std::vector<UnitId>> classes_;
};

// Convenience wrappers building a one-off engine.
Rational layer1(const Model& model, UnitId unit, const Event& outcome,
                const std::vector<Event>& condition);
Rational layer2(const Model& model, UnitId unit, const Intervention& iv,
                const Event& outcome);
Rational layer3_individual(const Model& model, UnitId unit, const Query& query);
UnitPosterior abduce(const Model& model, const std::vector<Event>& evidence);
Rational population_valuation(const Model& model, const Query& query);

// P(Y^d(X=x)=y | X=x, Y=y; u). Throws NullEventError when P(x, y; u) = 0.
Rational probability_of_consistency(ExactEngine& engine, UnitId unit,
                                    const std::string& treatment, Value x,
                                    const std::string& outcome, Value y);

// E[Y^d(t1); u] − E[Y^d(t0); u].
Rational ite(ExactEngine& engine, UnitId unit, const std::string& treatment,
             Value t1, Value t0, const std::string& outcome);

// Weight-normalized average of ite over `units`. Throws DomainError when the
// subset is empty or carries zero weight.
Rational cate(ExactEngine& engine, const std::vector<UnitId>& units,
              const std::string& treatment, Value t1, Value t0,
              const std::string& outcome);

// Units whose group/features satisfy `condition` (an expression over
// `unit`, in(G) and feat(x); nonzero means selected).
std::vector<UnitId> select_units(const Model& model, const Expr& condition);

// P(Y^d(T=t0)=y0, Y^d(T=t1)=y1; u), the complier score.
Rational complier_probability(ExactEngine& engine, UnitId unit,
                              const std::string& treatment, Value t0, Value t1,
                              const std::string& outcome, Value y0, Value y1);

// {"query", "mode", "value": {"num", "den"}, "decimal"} on one line.
std::string result_json(const Query& query, Coupling mode, const Rational& value);

}  // namespace disco
