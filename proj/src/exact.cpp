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

#include "disco/exact.hpp"

#include <algorithm>

#include "json.hpp"

#include "disco/error.hpp"

namespace disco {
namespace {

bool matches(const Event& e, const Value& v) {
  return std::binary_search(e.values.begin(), e.values.end(), v);
}

void require_factual(const std::vector<Event>& events, const char* what) {
  for (const auto& e : events)
    if (!e.world.is_factual())
      throw ValidationError(std::string(what) + " must refer to the factual world");
}

}  // namespace

Rational UnitPosterior::total(const std::vector<UnitId>& units) const {
  Rational sum = 0;
  for (UnitId u : units) sum += (*this)[u];
  return sum;
}

ExactEngine::ExactEngine(Model model) : base_(std::move(model)) {
  std::map<std::size_t, std::size_t> slot_of_class;
  for (UnitId u = 1; u <= base_.num_units(); ++u) {
    auto [it, fresh] = slot_of_class.emplace(base_.unit_class(u), classes_.size());
    if (fresh) classes_.emplace_back();
    classes_[it->second].push_back(u);
  }
}

const CompiledModel& ExactEngine::world(const WorldRef& w) {
  if (w.is_factual()) return base_;
  auto it = worlds_.find(w);
  if (it == worlds_.end()) {
    // Noise names are kept so every world shares the base model's noise
    // slots; independence between worlds is decided in law().
    Model sub = apply_do(base_.model().with_coupling(Coupling::Scm), w.intervention());
    it = worlds_.emplace(w, std::make_unique<CompiledModel>(std::move(sub))).first;
  }
  return *it->second;
}

const ExactEngine::Law& ExactEngine::law(const std::vector<WorldRef>& worlds, UnitId unit) {
  auto key = std::make_pair(worlds, base_.unit_class(unit));
  if (auto it = laws_.find(key); it != laws_.end()) return it->second;

  std::vector<const CompiledModel*> models;
  std::vector<bool> used(base_.num_noises(), false);
  std::vector<std::size_t> all_vars(base_.num_variables());
  for (std::size_t v = 0; v < all_vars.size(); ++v) all_vars[v] = v;
  for (const auto& w : worlds) {
    models.push_back(&world(w));
    for (std::size_t n : models.back()->ancestral_noises(all_vars)) used[n] = true;
  }
  std::vector<std::size_t> slots;
  for (std::size_t n = 0; n < used.size(); ++n)
    if (used[n]) slots.push_back(n);

  const std::size_t width = base_.num_variables();
  std::vector<Value> noise(base_.num_noises());
  for (std::size_t n = 0; n < noise.size(); ++n)
    noise[n] = base_.noise_pmf(n).entries().front().value;
  std::vector<std::size_t> pos(slots.size(), 0);
  std::map<std::vector<Value>, Rational> merged;
  std::vector<Value> row(width * worlds.size());

  for (;;) {
    Rational p = 1;
    for (std::size_t i = 0; i < slots.size() && p != 0; ++i) {
      const auto& entry = base_.noise_pmf(slots[i]).entries()[pos[i]];
      noise[slots[i]] = entry.value;
      p *= entry.prob;
    }
    if (p != 0) {
      for (std::size_t k = 0; k < models.size(); ++k)
        models[k]->solve(unit, noise, std::span<Value>(row).subspan(k * width, width));
      merged[row] += p;
    }
    std::size_t i = 0;
    for (; i < slots.size(); ++i) {
      if (++pos[i] < base_.noise_pmf(slots[i]).size()) break;
      pos[i] = 0;
    }
    if (i == slots.size()) break;
  }

  Law out;
  out.width = width;
  for (auto& [r, p] : merged) {
    out.rows.push_back(r);
    out.probs.push_back(p);
  }
  return laws_.emplace(std::move(key), std::move(out)).first->second;
}

std::size_t ExactEngine::slot(const Event& e, std::size_t world_pos) const {
  const std::size_t v = base_.variable_index(e.variable);
  if (v == CompiledModel::npos) throw ValidationError("undeclared variable " + e.variable);
  return world_pos * base_.num_variables() + v;
}

Rational ExactEngine::mass(const Law& law,
                           const std::vector<std::pair<std::size_t, const Event*>>& events) {
  Rational sum = 0;
  for (std::size_t r = 0; r < law.rows.size(); ++r) {
    bool ok = true;
    for (const auto& [s, e] : events)
      if (!matches(*e, law.rows[r][s])) {
        ok = false;
        break;
      }
    if (ok) sum += law.probs[r];
  }
  return sum;
}

Rational ExactEngine::weighted_sum(
    const Law& law, std::size_t value_slot,
    const std::vector<std::pair<std::size_t, const Event*>>& events) {
  Rational sum = 0;
  for (std::size_t r = 0; r < law.rows.size(); ++r) {
    bool ok = true;
    for (const auto& [s, e] : events)
      if (!matches(*e, law.rows[r][s])) {
        ok = false;
        break;
      }
    if (ok) sum += law.probs[r] * to_rational(law.rows[r][value_slot]);
  }
  return sum;
}

Rational ExactEngine::factual_mass(UnitId unit, const std::vector<Event>& events) {
  require_factual(events, "events");
  std::vector<std::pair<std::size_t, const Event*>> ev;
  for (const auto& e : events) ev.emplace_back(slot(e, 0), &e);
  return mass(law({WorldRef::factual()}, unit), ev);
}

Rational ExactEngine::individual(UnitId unit, const Query& query) {
  if (unit < 1 || unit > base_.num_units())
    throw ValidationError("unit " + std::to_string(unit) + " outside population");
  require_factual(query.evidence, "evidence");
  using Slots = std::vector<std::pair<std::size_t, const Event*>>;
  const std::vector<WorldRef> cf = query.counterfactual_worlds();
  const bool probability = query.kind == Query::Kind::Probability;

  if (coupling() == Coupling::Scm) {
    std::vector<WorldRef> worlds{WorldRef::factual()};
    worlds.insert(worlds.end(), cf.begin(), cf.end());
    auto position = [&](const WorldRef& w) {
      return static_cast<std::size_t>(std::find(worlds.begin(), worlds.end(), w) - worlds.begin());
    };
    const Law& joint = law(worlds, unit);
    Slots ev;
    for (const auto& e : query.evidence) ev.emplace_back(slot(e, 0), &e);
    const Rational pe = mass(joint, ev);
    if (pe == 0) throw NullEventError("conditioning on null event");
    if (!probability) {
      const std::size_t v = base_.variable_index(query.expectation_variable);
      if (v == CompiledModel::npos)
        throw ValidationError("undeclared variable " + query.expectation_variable);
      const std::size_t s = position(query.expectation_world) * joint.width + v;
      return weighted_sum(joint, s, ev) / pe;
    }
    Slots all = ev;
    for (const auto& e : query.targets) all.emplace_back(slot(e, position(e.world)), &e);
    Rational r = mass(joint, all) / pe;
    r.canonicalize();
    return r;
  }

  // Disco: the factual world carries the evidence; each counterfactual world
  // is an independent copy, so evidence does not reach it.
  Rational pe = 1;
  Slots ev;
  const Law* factual = nullptr;
  if (!query.evidence.empty() || query.references_factual_world()) {
    factual = &law({WorldRef::factual()}, unit);
    for (const auto& e : query.evidence) ev.emplace_back(slot(e, 0), &e);
    pe = mass(*factual, ev);
    if (pe == 0) throw NullEventError("conditioning on null event");
  }
  if (!probability) {
    const std::size_t v = base_.variable_index(query.expectation_variable);
    if (v == CompiledModel::npos)
      throw ValidationError("undeclared variable " + query.expectation_variable);
    if (query.expectation_world.is_factual()) return weighted_sum(*factual, v, ev) / pe;
    return weighted_sum(law({query.expectation_world}, unit), v, {});
  }
  Rational result = 1;
  if (query.references_factual_world()) {
    Slots all = ev;
    for (const auto& e : query.targets)
      if (e.world.is_factual()) all.emplace_back(slot(e, 0), &e);
    result = mass(*factual, all) / pe;
  }
  for (const auto& w : cf) {
    if (result == 0) break;
    Slots in_world;
    for (const auto& e : query.targets)
      if (e.world == w) in_world.emplace_back(slot(e, 0), &e);
    result *= mass(law({w}, unit), in_world);
  }
  result.canonicalize();
  return result;
}

Rational ExactEngine::layer1(UnitId unit, const Event& outcome,
                             const std::vector<Event>& condition) {
  require_factual({outcome}, "outcome");
  return individual(unit, Query::probability({outcome}, condition));
}

Rational ExactEngine::layer2(UnitId unit, const Intervention& iv, const Event& outcome) {
  Event e = outcome;
  e.world = WorldRef::counterfactual(iv);
  return individual(unit, Query::probability({e}));
}

Rational ExactEngine::expectation(UnitId unit, const Intervention& iv, const std::string& var) {
  return individual(unit, Query::expectation(var, WorldRef::counterfactual(iv)));
}

UnitPosterior ExactEngine::abduce(const std::vector<Event>& evidence,
                                  const std::optional<UnitRestriction>& restriction) {
  require_factual(evidence, "evidence");
  const auto& pop = base_.model().population;
  std::vector<Rational> mass_of(static_cast<std::size_t>(pop.count()), Rational(0));
  std::map<std::size_t, Rational> likelihood;  // by unit class
  Rational total = 0;
  for (UnitId u = 1; u <= pop.count(); ++u) {
    if (restriction) {
      if (restriction->kind == UnitRestriction::Kind::Unit && restriction->unit != u) continue;
      if (restriction->kind == UnitRestriction::Kind::Group &&
          pop.group_name_of(u) != restriction->group)
        continue;
    }
    const Rational prior = restriction && restriction->kind == UnitRestriction::Kind::Unit
                               ? Rational(1)
                               : pop.weight(u);
    if (prior == 0) continue;
    auto it = likelihood.find(base_.unit_class(u));
    if (it == likelihood.end())
      it = likelihood.emplace(base_.unit_class(u), factual_mass(u, evidence)).first;
    mass_of[static_cast<std::size_t>(u - 1)] = prior * it->second;
    total += mass_of[static_cast<std::size_t>(u - 1)];
  }
  if (restriction) {
    if (restriction->kind == UnitRestriction::Kind::Unit &&
        (restriction->unit < 1 || restriction->unit > pop.count()))
      throw ValidationError("unit " + std::to_string(restriction->unit) + " outside population");
    if (restriction->kind == UnitRestriction::Kind::Group && !pop.group_index(restriction->group))
      throw ValidationError("unknown group " + restriction->group);
  }
  if (total == 0) throw NullEventError("conditioning on null event");
  for (auto& m : mass_of) {
    m /= total;
    m.canonicalize();
  }
  return UnitPosterior(std::move(mass_of));
}

Rational ExactEngine::population(const Query& query) {
  const UnitPosterior post = abduce(query.evidence, query.restriction);
  std::map<std::size_t, Rational> by_class;
  Rational sum = 0;
  for (UnitId u = 1; u <= post.size(); ++u) {
    if (post[u] == 0) continue;
    auto it = by_class.find(base_.unit_class(u));
    if (it == by_class.end()) it = by_class.emplace(base_.unit_class(u), individual(u, query)).first;
    sum += post[u] * it->second;
  }
  sum.canonicalize();
  return sum;
}

Rational layer1(const Model& model, UnitId unit, const Event& outcome,
                const std::vector<Event>& condition) {
  return ExactEngine(model).layer1(unit, outcome, condition);
}

Rational layer2(const Model& model, UnitId unit, const Intervention& iv, const Event& outcome) {
  return ExactEngine(model).layer2(unit, iv, outcome);
}

Rational layer3_individual(const Model& model, UnitId unit, const Query& query) {
  return ExactEngine(model).individual(unit, query);
}

UnitPosterior abduce(const Model& model, const std::vector<Event>& evidence) {
  return ExactEngine(model).abduce(evidence);
}

Rational population_valuation(const Model& model, const Query& query) {
  return ExactEngine(model).population(query);
}

Rational probability_of_consistency(ExactEngine& engine, UnitId unit,
                                    const std::string& treatment, Value x,
                                    const std::string& outcome, Value y) {
  const Query q = Query::probability(
      {Event::equals(outcome, y, WorldRef::counterfactual({{treatment, x}}))},
      {Event::equals(treatment, x), Event::equals(outcome, y)});
  return engine.individual(unit, q);
}

Rational ite(ExactEngine& engine, UnitId unit, const std::string& treatment, Value t1,
             Value t0, const std::string& outcome) {
  return engine.expectation(unit, {{treatment, t1}}, outcome) -
         engine.expectation(unit, {{treatment, t0}}, outcome);
}

Rational cate(ExactEngine& engine, const std::vector<UnitId>& units,
              const std::string& treatment, Value t1, Value t0,
              const std::string& outcome) {
  if (units.empty()) throw DomainError("cate: condition selects no units");
  const auto& pop = engine.model().population;
  std::map<std::size_t, Rational> by_class;
  Rational weight = 0;
  Rational sum = 0;
  for (UnitId u : units) {
    const Rational w = pop.weight(u);
    if (w == 0) continue;
    const std::size_t c = engine.compiled().unit_class(u);
    auto it = by_class.find(c);
    if (it == by_class.end()) it = by_class.emplace(c, ite(engine, u, treatment, t1, t0, outcome)).first;
    weight += w;
    sum += w * it->second;
  }
  if (weight == 0) throw DomainError("cate: selected units carry zero weight");
  Rational r = sum / weight;
  r.canonicalize();
  return r;
}

std::vector<UnitId> select_units(const Model& model, const Expr& condition) {
  ExprScope scope;
  scope.groups = model.population.group_names();
  scope.features = model.population.feature_names();
  const CompiledExpr expr(condition, scope);
  std::vector<UnitId> out;
  for (UnitId u = 1; u <= model.population.count(); ++u) {
    const UnitContext ctx{u, model.population.group_of(u), model.population.features(u)};
    if (!expr.evaluate({}, {}, ctx).is_zero()) out.push_back(u);
  }
  return out;
}

Rational complier_probability(ExactEngine& engine, UnitId unit, const std::string& treatment,
                              Value t0, Value t1, const std::string& outcome, Value y0,
                              Value y1) {
  return engine.individual(
      unit, Query::probability(
                {Event::equals(outcome, y0, WorldRef::counterfactual({{treatment, t0}})),
                 Event::equals(outcome, y1, WorldRef::counterfactual({{treatment, t1}}))}));
}

std::string result_json(const Query& query, Coupling mode, const Rational& value) {
  nlohmann::ordered_json j;
  j["query"] = to_string(query);
  j["mode"] = to_string(mode);
  j["value"] = {{"num", value.get_num().get_str()}, {"den", value.get_den().get_str()}};
  j["decimal"] = decimal_string(value);
  return j.dump();
}

}  // namespace disco
