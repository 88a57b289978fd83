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

#include "disco/ipw.hpp"

#include <cmath>
#include <map>

#include "disco/error.hpp"
#include "disco/verify.hpp"

namespace disco {
namespace {

std::string ranges(const std::vector<UnitId>& units) {
  std::string out;
  for (std::size_t i = 0; i < units.size();) {
    std::size_t j = i;
    while (j + 1 < units.size() && units[j + 1] == units[j] + 1) ++j;
    if (!out.empty()) out += ", ";
    out += std::to_string(units[i]);
    if (j > i) out += ".." + std::to_string(units[j]);
    i = j + 1;
  }
  return out;
}

// Σ_y y · P(events, Y=y; u).
Rational outcome_moment(ExactEngine& engine, UnitId u, std::vector<Event> events,
                        const std::string& outcome) {
  const VariableDecl* y = engine.model().find_variable(outcome);
  if (!y) throw ValidationError("undeclared variable " + outcome);
  Rational sum = 0;
  events.push_back(Event::equals(outcome, 0));
  for (const auto& v : y->domain) {
    if (v.is_zero()) continue;
    events.back().values = {v};
    sum += to_rational(v) * engine.factual_mass(u, events);
  }
  return sum;
}

}  // namespace

std::string IdentityReport::summary() const {
  std::string out = name + ": " + fraction_string(lhs) + (holds() ? " == " : " != ") +
                    fraction_string(rhs);
  for (const auto& n : notes) out += "\n  " + n;
  return out;
}

std::map<UnitId, Rational> propensities(ExactEngine& engine, const std::string& treatment,
                                        Value t) {
  std::map<UnitId, Rational> out;
  for (const auto& cls : engine.unit_classes()) {
    const Rational p = engine.factual_mass(cls.front(), {Event::equals(treatment, t)});
    for (UnitId u : cls) out[u] = p;
  }
  return out;
}

void require_positivity(ExactEngine& engine, const std::string& treatment, Value t) {
  const auto& pop = engine.model().population;
  std::map<std::string, std::vector<UnitId>> offending;
  for (const auto& [u, p] : propensities(engine, treatment, t))
    if (p == 0 && pop.weight(u) != 0) offending[pop.group_name_of(u)].push_back(u);
  if (offending.empty()) return;
  std::string msg = "positivity violated: P(" + treatment + "=" + t.to_string() + " | u) = 0";
  for (const auto& [group, units] : offending)
    msg += " for " + std::to_string(units.size()) + " unit(s) in group " + group + " (units " +
           ranges(units) + ")";
  throw PositivityError(msg);
}

IdentityReport ipw_ate_check(const Model& model, const std::string& treatment,
                             const std::string& outcome, Value t_star) {
  ExactEngine engine(model);
  require_deterministic_ancestors(engine, treatment);
  require_positivity(engine, treatment, t_star);
  IdentityReport r{"ipw E[" + outcome + "[" + treatment + "=" + t_star.to_string() + "]]", 0, 0, {}};
  const auto& pop = model.population;
  for (const auto& cls : engine.unit_classes()) {
    const UnitId u = cls.front();
    Rational w = 0;
    for (UnitId v : cls) w += pop.weight(v);
    if (w == 0) continue;
    r.lhs += w * engine.expectation(u, {{treatment, t_star}}, outcome);
    const Rational p = engine.factual_mass(u, {Event::equals(treatment, t_star)});
    r.rhs += w * outcome_moment(engine, u, {Event::equals(treatment, t_star)}, outcome) / p;
  }
  r.lhs.canonicalize();
  r.rhs.canonicalize();
  return r;
}

Estimate ipw_ate_estimate(const Dataset& data, const std::map<UnitId, Rational>& propensity,
                          const std::string& treatment, const std::string& outcome,
                          Value t_star) {
  if (data.records.empty()) throw ValidationError("empty dataset");
  const std::size_t tc = data.column(treatment);
  const std::size_t yc = data.column(outcome);
  double sum = 0, sum_sq = 0;
  for (const auto& rec : data.records) {
    double x = 0;
    if (rec.values[tc] == t_star) {
      auto it = propensity.find(rec.unit);
      if (it == propensity.end() || it->second == 0)
        throw PositivityError("positivity violated: unit " + std::to_string(rec.unit) +
                              " has no positive propensity for " + treatment + "=" +
                              t_star.to_string());
      x = rec.values[yc].to_double() / it->second.get_d();
    }
    sum += x;
    sum_sq += x * x;
  }
  Estimate e;
  e.n = e.draws = static_cast<std::int64_t>(data.records.size());
  e.seed = data.provenance.seed.value_or(0);
  const double m = static_cast<double>(e.n);
  e.point = sum / m;
  if (e.n > 1) e.std_error = std::sqrt(std::max(0.0, (sum_sq - m * e.point * e.point) / (m - 1)) / m);
  return e;
}

void require_feature_independence(ExactEngine& engine, const std::string& feature,
                                  const std::string& treatment, const std::string& outcome) {
  const CompiledModel& cm = engine.compiled();
  const std::size_t x = cm.variable_index(feature);
  const std::size_t t = cm.variable_index(treatment);
  const std::size_t y = cm.variable_index(outcome);
  if (x == CompiledModel::npos || t == CompiledModel::npos || y == CompiledModel::npos)
    throw ValidationError("undeclared feature, treatment or outcome");
  if (!cm.parents(x).empty())
    throw DomainError("structural independence violated: " + feature + " reads " +
                      cm.model().variables[cm.parents(x).front()].name);
  if (is_unit_deterministic(engine, feature)) return;
  for (std::size_t v : {t, y}) {
    const auto anc = cm.ancestors(v);
    if (std::find(anc.begin(), anc.end(), x) != anc.end())
      throw DomainError("structural independence violated: " + feature +
                        " is random given the unit and feeds " + cm.model().variables[v].name);
  }
}

IdentityReport ipw_conditional_check(const Model& model, const std::string& treatment,
                                     const std::string& feature, const std::string& outcome,
                                     Value t_prime, Value x_prime) {
  ExactEngine engine(model);
  require_feature_independence(engine, feature, treatment, outcome);
  require_deterministic_ancestors(engine, treatment);
  require_positivity(engine, treatment, t_prime);
  const Event ex = Event::equals(feature, x_prime);
  const Event et = Event::equals(treatment, t_prime);
  const Rational px = engine.population(Query::probability({ex}));
  if (px == 0) throw NullEventError("conditioning on null event " + ex.to_string());
  IdentityReport r{"ipw E[" + outcome + "[" + treatment + "=" + t_prime.to_string() + "] | " +
                       ex.to_string() + "]",
                   engine.population(Query::expectation(
                       outcome, WorldRef::counterfactual({{treatment, t_prime}}), {ex})),
                   0,
                   {}};
  const auto& pop = model.population;
  for (const auto& cls : engine.unit_classes()) {
    const UnitId u = cls.front();
    Rational w = 0;
    for (UnitId v : cls) w += pop.weight(v);
    if (w == 0) continue;
    const Rational pt = engine.factual_mass(u, {et});
    r.rhs += w * outcome_moment(engine, u, {et, ex}, outcome) / (pt * px);
  }
  r.rhs.canonicalize();
  return r;
}

IdentityReport ipw_posttreatment_check(const Model& model, const std::string& treatment,
                                       const std::string& feature, const std::string& outcome,
                                       Value x, Value t, Value y) {
  if (model.coupling != Coupling::Disco)
    throw DomainError("the post-treatment identity is defined only in disco coupling");
  ExactEngine engine(model);
  require_feature_independence(engine, feature, treatment, outcome);
  require_deterministic_ancestors(engine, treatment);
  const Event ex = Event::equals(feature, x);
  const Event et = Event::equals(treatment, t);
  const Event ey = Event::equals(outcome, y);
  const Rational pxty = engine.population(Query::probability({ex, et, ey}));
  if (pxty == 0)
    throw NullEventError("conditioning on null event " + ex.to_string() + ", " +
                         et.to_string() + ", " + ey.to_string());
  const Rational ptx = engine.population(Query::probability({et, ex}));
  const Rational py_given_tx = pxty / ptx;
  IdentityReport r{"ipw E[" + outcome + "[" + treatment + "=" + t.to_string() + "] | " +
                       ex.to_string() + ", " + et.to_string() + ", " + ey.to_string() + "]",
                   engine.population(Query::expectation(
                       outcome, WorldRef::counterfactual({{treatment, t}}), {ex, et, ey})),
                   0,
                   {}};
  const auto& pop = model.population;
  for (const auto& cls : engine.unit_classes()) {
    const UnitId u = cls.front();
    Rational w = 0;
    for (UnitId v : cls) w += pop.weight(v);
    if (w == 0) continue;
    const Rational pt = engine.factual_mass(u, {et});
    if (pt == 0) continue;
    const Rational py_given_t = engine.factual_mass(u, {et, ey}) / pt;
    r.rhs += w * outcome_moment(engine, u, {et, ex}, outcome) / ptx * py_given_t / py_given_tx;
  }
  r.rhs.canonicalize();
  return r;
}

}  // namespace disco
