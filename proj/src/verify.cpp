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

#include "disco/verify.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "disco/error.hpp"

namespace disco {
namespace {

std::unique_ptr<ExactEngine> make(const EngineFactory& factory, const Model& model) {
  return factory ? factory(model) : std::make_unique<ExactEngine>(model);
}

std::string unit_label(const Model& model, UnitId u) {
  return "unit " + std::to_string(u) + " (group " + model.population.group_name_of(u) + ")";
}

void compare(CheckReport& report, const std::string& what, const Rational& a,
             const Rational& b) {
  ++report.checked;
  if (a != b)
    report.failures.push_back(what + ": disco " + fraction_string(a) + " vs scm " +
                              fraction_string(b));
}

std::vector<Intervention> small_interventions(const Model& model) {
  std::vector<Intervention> out{{}};
  for (const auto& v : model.variables)
    for (const auto& value : v.domain) out.push_back({{v.name, value}});
  return out;
}

}  // namespace

std::string CheckReport::summary() const {
  std::ostringstream os;
  os << name << ": " << checked << " checks, " << failures.size() << " failures";
  for (const auto& f : failures) os << "\n  FAIL " << f;
  for (const auto& n : notes) os << "\n  " << n;
  return os.str();
}

EngineFactory default_engine_factory() {
  return [](const Model& m) { return std::make_unique<ExactEngine>(m); };
}

void require_binary(const Model& model, const std::string& var) {
  const VariableDecl* decl = model.find_variable(var);
  if (!decl) throw ValidationError("undeclared variable " + var);
  if (decl->domain.size() != 2)
    throw DomainError("treatment " + var + " must be binary (domain has " +
                      std::to_string(decl->domain.size()) + " values)");
}

bool is_unit_deterministic(ExactEngine& engine, const std::string& var) {
  const VariableDecl* decl = engine.model().find_variable(var);
  if (!decl) throw ValidationError("undeclared variable " + var);
  for (const auto& cls : engine.unit_classes())
    for (const auto& v : decl->domain) {
      const Rational p = engine.factual_mass(cls.front(), {Event::equals(var, v)});
      if (p != 0 && p != 1) return false;
    }
  return true;
}

void require_deterministic_ancestors(ExactEngine& engine, const std::string& treatment) {
  const CompiledModel& cm = engine.compiled();
  const std::size_t t = cm.variable_index(treatment);
  if (t == CompiledModel::npos) throw ValidationError("undeclared variable " + treatment);
  for (std::size_t a : cm.ancestors(t)) {
    const std::string& name = cm.model().variables[a].name;
    if (!is_unit_deterministic(engine, name))
      throw DomainError("treatment " + treatment + " has ancestor " + name +
                        " that is random given the unit");
  }
}

CheckReport verify_layer12_equivalence(const Model& model, const EngineFactory& factory) {
  CheckReport report{"layer12", 0, {}, {}};
  auto disco = make(factory, model.with_coupling(Coupling::Disco));
  auto scm = make(factory, model.with_coupling(Coupling::Scm));
  const auto interventions = small_interventions(model);
  for (const auto& cls : disco->unit_classes()) {
    const UnitId u = cls.front();
    const std::string who = unit_label(model, u);
    for (const auto& v : model.variables)
      for (const auto& value : v.domain) {
        const Event outcome = Event::equals(v.name, value);
        compare(report, who + " P(" + outcome.to_string() + ")", disco->layer1(u, outcome, {}),
                scm->layer1(u, outcome, {}));
        for (const auto& w : model.variables) {
          if (w.name == v.name) continue;
          for (const auto& wv : w.domain) {
            const Event cond = Event::equals(w.name, wv);
            if (disco->factual_mass(u, {cond}) == 0) continue;
            compare(report, who + " P(" + outcome.to_string() + " | " + cond.to_string() + ")",
                    disco->layer1(u, outcome, {cond}), scm->layer1(u, outcome, {cond}));
          }
        }
        for (const auto& iv : interventions)
          compare(report,
                  who + " P(" + v.name + "[" + to_string(iv) + "]=" + value.to_string() + ")",
                  disco->layer2(u, iv, outcome), scm->layer2(u, iv, outcome));
      }
  }
  return report;
}

CheckReport verify_degenerate_l3_equivalence(const Model& model, const EngineFactory& factory) {
  for (const auto& n : model.noises)
    if (!n.pmf.is_point_mass())
      throw DomainError("noise " + n.name + " is not a point mass");
  CheckReport report{"degenerate-l3", 0, {}, {}};
  auto disco = make(factory, model.with_coupling(Coupling::Disco));
  auto scm = make(factory, model.with_coupling(Coupling::Scm));
  std::vector<WorldRef> cf;
  for (auto& iv : small_interventions(model)) cf.push_back(WorldRef::counterfactual(iv));
  const WorldRef empty = WorldRef::counterfactual({});
  auto both = [&](UnitId u, const Query& q) {
    compare(report, unit_label(model, u) + " " + to_string(q), disco->individual(u, q),
            scm->individual(u, q));
  };
  for (const auto& cls : disco->unit_classes()) {
    const UnitId u = cls.front();
    for (const auto& w : cf)
      for (const WorldRef& other : {WorldRef::factual(), empty}) {
        if (w == other) continue;
        for (const auto& v1 : model.variables)
          for (const auto& a : v1.domain)
            for (const auto& v2 : model.variables)
              for (const auto& b : v2.domain)
                both(u, Query::probability({Event::equals(v1.name, a, other),
                                            Event::equals(v2.name, b, w)}));
      }
    for (const auto& e : model.variables)
      for (const auto& ev : e.domain) {
        const Event evidence = Event::equals(e.name, ev);
        if (disco->factual_mass(u, {evidence}) == 0) continue;
        for (const auto& w : cf)
          for (const auto& v : model.variables)
            for (const auto& b : v.domain)
              both(u, Query::probability({Event::equals(v.name, b, w)}, {evidence}));
      }
  }
  return report;
}

CheckReport verify_mixture_lemma(const Model& model, const std::string& treatment,
                                 const std::string& outcome) {
  require_binary(model, treatment);
  CheckReport report{"mixture", 0, {}, {}};
  ExactEngine engine(model);
  require_deterministic_ancestors(engine, treatment);
  const VariableDecl* y = model.find_variable(outcome);
  if (!y) throw ValidationError("undeclared variable " + outcome);
  const auto& arms = model.find_variable(treatment)->domain;
  for (const auto& cls : engine.unit_classes()) {
    const UnitId u = cls.front();
    for (const auto& yv : y->domain) {
      const Event ey = Event::equals(outcome, yv);
      const Rational lhs = engine.layer1(u, ey, {});
      Rational rhs = 0;
      for (const auto& x : arms) {
        const Rational px = engine.factual_mass(u, {Event::equals(treatment, x)});
        if (px != 0) rhs += px * engine.layer2(u, {{treatment, x}}, ey);
      }
      ++report.checked;
      if (lhs != rhs)
        report.failures.push_back(unit_label(model, u) + " y=" + yv.to_string() + ": " +
                                  fraction_string(lhs) + " vs mixture " +
                                  fraction_string(rhs));
    }
  }
  return report;
}

CheckReport verify_consistency_equivalence(const Model& model, const std::string& treatment,
                                           const std::string& outcome) {
  CheckReport report{"consistency", 0, {}, {}};
  ExactEngine engine(model.with_coupling(Coupling::Disco));
  require_deterministic_ancestors(engine, treatment);
  const VariableDecl* x = model.find_variable(treatment);
  const VariableDecl* y = model.find_variable(outcome);
  if (!x || !y) throw ValidationError("undeclared treatment or outcome");
  for (const auto& cls : engine.unit_classes()) {
    const UnitId u = cls.front();
    for (const auto& xv : x->domain) {
      const Event ex = Event::equals(treatment, xv);
      if (engine.factual_mass(u, {ex}) == 0) continue;
      const WorldRef w = WorldRef::counterfactual({{treatment, xv}});
      for (const auto& yv : y->domain) {
        const Rational factual = engine.layer1(u, Event::equals(outcome, yv), {ex});
        std::vector<std::vector<Event>> evidences{{ex}};
        for (const auto& other : y->domain)
          if (engine.factual_mass(u, {ex, Event::equals(outcome, other)}) != 0)
            evidences.push_back({ex, Event::equals(outcome, other)});
        for (const auto& ev : evidences) {
          const Query q = Query::probability({Event::equals(outcome, yv, w)}, ev);
          const Rational cf = engine.individual(u, q);
          ++report.checked;
          if (cf != factual)
            report.failures.push_back(unit_label(model, u) + " " + to_string(q) + " = " +
                                      fraction_string(cf) + " but P(" + outcome + "=" +
                                      yv.to_string() + " | " + ex.to_string() + ") = " +
                                      fraction_string(factual));
        }
      }
    }
  }
  return report;
}

CheckReport check_propensity_independence(const Model& model, const std::string& treatment,
                                          const std::string& outcome, Value t) {
  require_binary(model, treatment);
  CheckReport report{"propensity", 0, {}, {}};
  ExactEngine engine(model);
  const Value treated = model.find_variable(treatment)->domain.back() >
                                model.find_variable(treatment)->domain.front()
                            ? model.find_variable(treatment)->domain.back()
                            : model.find_variable(treatment)->domain.front();
  const VariableDecl* y = model.find_variable(outcome);
  if (!y) throw ValidationError("undeclared variable " + outcome);
  const WorldRef w = WorldRef::counterfactual({{treatment, t}});
  const Event is_treated = Event::equals(treatment, treated);

  // stratum -> y -> (P(T=t1, Y^d=y, stratum), P(Y^d=y, stratum))
  std::map<Rational, std::map<Value, std::pair<Rational, Rational>>> strata;
  std::map<Value, std::pair<Rational, Rational>> overall;
  const auto& pop = model.population;
  for (const auto& cls : engine.unit_classes()) {
    const UnitId rep = cls.front();
    const Rational e = engine.factual_mass(rep, {is_treated});
    Rational weight = 0;
    for (UnitId u : cls) weight += pop.weight(u);
    for (const auto& yv : y->domain) {
      const Event ey = Event::equals(outcome, yv, w);
      const Rational joint = engine.individual(rep, Query::probability({is_treated, ey}));
      const Rational marginal = engine.individual(rep, Query::probability({ey}));
      auto& cell = strata[e][yv];
      cell.first += weight * joint;
      cell.second += weight * marginal;
      overall[yv].first += weight * joint;
      overall[yv].second += weight * marginal;
    }
  }
  for (const auto& [p, by_y] : strata)
    for (const auto& [yv, cell] : by_y) {
      if (cell.second == 0) continue;
      const Rational ratio = cell.first / cell.second;
      ++report.checked;
      if (ratio != p)
        report.failures.push_back("stratum e=" + fraction_string(p) + ", y=" + yv.to_string() +
                                  ": P(T=" + treated.to_string() + " | " + outcome + "[" +
                                  to_string(w.intervention()) + "]=y, e) = " +
                                  fraction_string(ratio));
    }
  for (const auto& [yv, cell] : overall)
    if (cell.second != 0)
      report.notes.push_back("unconditional P(" + treatment + "=" + treated.to_string() + " | " +
                             outcome + w.tag() + "=" + yv.to_string() +
                             ") = " + fraction_string(Rational(cell.first / cell.second)));
  return report;
}

}  // namespace disco
