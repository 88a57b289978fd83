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

#include "disco/model.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "disco/compiled.hpp"
#include "disco/error.hpp"

namespace disco {

std::string to_string(const Intervention& iv) {
  std::string out;
  for (const auto& [var, value] : iv) {
    if (!out.empty()) out += ',';
    out += var + "=" + value.to_string();
  }
  return out;
}

// --- FinitePmf ------------------------------------------------------------

FinitePmf FinitePmf::uniform(const std::vector<Value>& values) {
  std::vector<PmfEntry> entries;
  const Rational p(1, static_cast<unsigned long>(values.size()));
  for (const auto& v : values) entries.push_back({v, p});
  return FinitePmf(std::move(entries));
}

FinitePmf FinitePmf::uniform_range(std::int64_t lo, std::int64_t hi) {
  std::vector<Value> values;
  for (std::int64_t v = lo; v <= hi; ++v) values.emplace_back(v);
  return uniform(values);
}

FinitePmf FinitePmf::point(Value v) { return FinitePmf({{v, Rational(1)}}); }

bool FinitePmf::is_point_mass() const {
  std::size_t positive = 0;
  for (const auto& e : entries_)
    if (e.prob > 0) ++positive;
  return positive == 1;
}

Value FinitePmf::mode() const {
  if (entries_.empty()) throw ValidationError("empty pmf has no mode");
  const PmfEntry* best = &entries_.front();
  for (const auto& e : entries_)
    if (e.prob > best->prob) best = &e;
  return best->value;
}

std::vector<std::string> FinitePmf::problems() const {
  std::vector<std::string> out;
  if (entries_.empty()) {
    out.push_back("pmf is empty");
    return out;
  }
  Rational total = 0;
  std::set<Value> seen;
  for (const auto& e : entries_) {
    if (e.prob < 0) out.push_back("negative probability for value " + e.value.to_string());
    if (!seen.insert(e.value).second)
      out.push_back("duplicate value " + e.value.to_string());
    total += e.prob;
  }
  if (total != 1)
    out.push_back("pmf not normalized (sums to " + fraction_string(total) + ")");
  return out;
}

// --- UnitPopulation ---------------------------------------------------------

UnitPopulation::UnitPopulation(std::int64_t count)
    : count_(count),
      unit_group_(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)), npos),
      assignment_count_(unit_group_.size(), 0) {}

void UnitPopulation::assign(const std::string& group, std::int64_t lo,
                            std::int64_t hi) {
  std::size_t g;
  if (auto existing = group_index(group)) {
    g = *existing;
  } else {
    g = group_names_.size();
    group_names_.push_back(group);
  }
  if (lo < 1 || hi > count_ || lo > hi)
    throw ValidationError("group " + group + ": range " + std::to_string(lo) +
                          ".." + std::to_string(hi) + " outside 1.." +
                          std::to_string(count_));
  for (std::int64_t u = lo; u <= hi; ++u) {
    const auto i = static_cast<std::size_t>(u - 1);
    unit_group_[i] = g;
    ++assignment_count_[i];
  }
}

void UnitPopulation::set_features(std::vector<std::string> names,
                                  std::vector<std::vector<Value>> rows) {
  feature_names_ = std::move(names);
  features_ = std::move(rows);
}

std::optional<std::size_t> UnitPopulation::group_index(const std::string& name) const {
  auto it = std::find(group_names_.begin(), group_names_.end(), name);
  if (it == group_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - group_names_.begin());
}

std::size_t UnitPopulation::group_of(UnitId unit) const {
  if (unit < 1 || unit > count_) return npos;
  return unit_group_[static_cast<std::size_t>(unit - 1)];
}

const std::string& UnitPopulation::group_name_of(UnitId unit) const {
  const std::size_t g = group_of(unit);
  if (g == npos) throw ValidationError("unit " + std::to_string(unit) + " has no group");
  return group_names_[g];
}

std::vector<UnitId> UnitPopulation::units_in(const std::string& group) const {
  std::vector<UnitId> out;
  auto g = group_index(group);
  if (!g) return out;
  for (std::size_t i = 0; i < unit_group_.size(); ++i)
    if (unit_group_[i] == *g) out.push_back(static_cast<UnitId>(i + 1));
  return out;
}

Rational UnitPopulation::weight(UnitId unit) const {
  if (weights_.empty()) return Rational(1, static_cast<unsigned long>(count_));
  return weights_[static_cast<std::size_t>(unit - 1)];
}

std::span<const Value> UnitPopulation::features(UnitId unit) const {
  if (features_.empty()) return {};
  return features_[static_cast<std::size_t>(unit - 1)];
}

std::vector<std::string> UnitPopulation::problems() const {
  std::vector<std::string> out;
  if (count_ < 1) {
    out.push_back("population must contain at least one unit");
    return out;
  }
  for (std::size_t i = 0; i < unit_group_.size(); ++i) {
    if (assignment_count_[i] == 0)
      out.push_back("unit " + std::to_string(i + 1) + " belongs to no group");
    else if (assignment_count_[i] > 1)
      out.push_back("unit " + std::to_string(i + 1) + " belongs to more than one group");
  }
  if (!weights_.empty()) {
    if (weights_.size() != static_cast<std::size_t>(count_)) {
      out.push_back("unit weights: expected " + std::to_string(count_) + " entries");
    } else {
      Rational total = 0;
      for (const auto& w : weights_) {
        if (w < 0) out.push_back("unit weights: negative weight");
        total += w;
      }
      if (total != 1) out.push_back("unit weights: pmf not normalized");
    }
  }
  if (!feature_names_.empty() || !features_.empty()) {
    if (features_.size() != static_cast<std::size_t>(count_))
      out.push_back("features: expected one row per unit");
    for (const auto& row : features_)
      if (row.size() != feature_names_.size()) {
        out.push_back("features: row width does not match header");
        break;
      }
  }
  return out;
}

// --- equations, model -------------------------------------------------------

const Expr* StructuralEquation::body_for(const std::string& group) const {
  const Expr* fallback = nullptr;
  for (const auto& [g, body] : bodies) {
    if (g == group) return &body;
    if (g == kDefaultGroup) fallback = &body;
  }
  return fallback;
}

std::string to_string(Coupling c) { return c == Coupling::Disco ? "disco" : "scm"; }

Coupling parse_coupling(const std::string& text) {
  if (text == "disco") return Coupling::Disco;
  if (text == "scm") return Coupling::Scm;
  throw ValidationError("unknown coupling mode '" + text + "' (expected disco or scm)");
}

const VariableDecl* Model::find_variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

const NoiseDecl* Model::find_noise(const std::string& name) const {
  for (const auto& n : noises)
    if (n.name == name) return &n;
  return nullptr;
}

const StructuralEquation* Model::find_equation(const std::string& target) const {
  for (const auto& e : equations)
    if (e.target == target) return &e;
  return nullptr;
}

Model Model::with_coupling(Coupling c) const {
  Model m = *this;
  m.coupling = c;
  return m;
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

namespace {

// Parent edges by variable slot, ignoring unknown names.
std::vector<std::vector<std::size_t>> parent_slots(const Model& model) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < model.variables.size(); ++i)
    index.emplace(model.variables[i].name, i);
  std::vector<std::vector<std::size_t>> parents(model.variables.size());
  for (const auto& eq : model.equations) {
    auto t = index.find(eq.target);
    if (t == index.end()) continue;
    for (const auto& p : eq.parents)
      if (auto it = index.find(p); it != index.end())
        parents[t->second].push_back(it->second);
  }
  return parents;
}

// Kahn's algorithm picking the earliest declared ready variable. Returns the
// cycle (as names) through `cycle` when no order exists.
std::vector<std::size_t> order_slots(const Model& model,
                                     std::vector<std::string>* cycle) {
  const auto parents = parent_slots(model);
  const std::size_t n = parents.size();
  std::vector<bool> placed(n, false);
  std::vector<std::size_t> order;
  while (order.size() < n) {
    bool progress = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (placed[v]) continue;
      const bool ready = std::all_of(parents[v].begin(), parents[v].end(),
                                     [&](std::size_t p) { return placed[p]; });
      if (ready) {
        placed[v] = true;
        order.push_back(v);
        progress = true;
        break;
      }
    }
    if (!progress) break;
  }
  if (order.size() == n || cycle == nullptr) return order;

  // Walk parent edges among unplaced variables until a slot repeats.
  std::size_t start = 0;
  while (placed[start]) ++start;
  std::vector<std::size_t> path;
  std::vector<std::size_t> seen_at(n, static_cast<std::size_t>(-1));
  std::size_t v = start;
  while (seen_at[v] == static_cast<std::size_t>(-1)) {
    seen_at[v] = path.size();
    path.push_back(v);
    for (std::size_t p : parents[v])
      if (!placed[p]) {
        v = p;
        break;
      }
  }
  // path[seen_at[v]..] is the cycle child->parent; report parent->child.
  cycle->clear();
  for (std::size_t i = path.size(); i-- > seen_at[v];)
    cycle->push_back(model.variables[path[i]].name);
  cycle->push_back(model.variables[path.back()].name);
  return order;
}

std::string describe_cycle(const std::vector<std::string>& cycle) {
  std::string out = "cyclic dependency: ";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += " -> ";
    out += cycle[i];
  }
  return out;
}

ExprScope scope_for(const Model& model, const StructuralEquation& eq) {
  ExprScope scope;
  scope.variables = eq.parents;
  scope.noises = eq.noises;
  scope.groups = model.population.group_names();
  scope.features = model.population.feature_names();
  return scope;
}

bool uses_unit_id(const Expr& e) {
  if (e.op() == ExprOp::UnitId) return true;
  for (const auto& a : e.node().args)
    if (uses_unit_id(a)) return true;
  return false;
}

bool in_domain(const std::vector<Value>& domain, const Value& v) {
  return std::find(domain.begin(), domain.end(), v) != domain.end();
}

// Structural checks that do not need evaluation.
void check_structure(const Model& model, std::vector<std::string>& out) {
  for (auto& p : model.population.problems()) out.push_back(std::move(p));

  std::set<std::string> names;
  for (const auto& n : model.noises) {
    if (!names.insert(n.name).second) out.push_back("duplicate noise name " + n.name);
    for (const auto& p : n.pmf.problems()) out.push_back("noise " + n.name + ": " + p);
  }
  for (const auto& v : model.variables) {
    if (!names.insert(v.name).second) out.push_back("duplicate name " + v.name);
    if (v.domain.empty()) out.push_back("variable " + v.name + ": empty domain");
    std::set<Value> seen(v.domain.begin(), v.domain.end());
    if (seen.size() != v.domain.size())
      out.push_back("variable " + v.name + ": duplicate domain value");
  }

  std::map<std::string, int> equation_count;
  std::map<std::string, std::string> noise_owner;
  for (const auto& eq : model.equations) {
    ++equation_count[eq.target];
    if (!model.find_variable(eq.target)) {
      out.push_back("equation for undeclared variable " + eq.target);
      continue;
    }
    for (const auto& p : eq.parents) {
      if (p == eq.target)
        out.push_back("equation " + eq.target + ": reads itself");
      else if (!model.find_variable(p))
        out.push_back("equation " + eq.target + ": unknown parent " + p);
    }
    for (const auto& n : eq.noises) {
      if (!model.find_noise(n)) {
        out.push_back("equation " + eq.target + ": unknown noise " + n);
        continue;
      }
      auto [it, fresh] = noise_owner.emplace(n, eq.target);
      if (!fresh)
        out.push_back("noise " + n + " used by more than one equation (" +
                      it->second + ", " + eq.target + ")");
    }
    std::set<std::string> allowed(eq.parents.begin(), eq.parents.end());
    allowed.insert(eq.noises.begin(), eq.noises.end());
    for (const auto& [group, body] : eq.bodies) {
      if (group != kDefaultGroup && !model.population.group_index(group))
        out.push_back("equation " + eq.target + ": unknown group " + group);
      std::set<std::string> ids, features, groups;
      body.collect_identifiers(ids);
      body.collect_features(features);
      body.collect_groups(groups);
      for (const auto& id : ids)
        if (!allowed.count(id))
          out.push_back("equation " + eq.target + ": body reads undeclared name " + id);
      const auto& fnames = model.population.feature_names();
      for (const auto& f : features)
        if (std::find(fnames.begin(), fnames.end(), f) == fnames.end())
          out.push_back("equation " + eq.target + ": unknown feature " + f);
      for (const auto& g : groups)
        if (!model.population.group_index(g))
          out.push_back("equation " + eq.target + ": unknown group " + g);
    }
    for (const auto& g : model.population.group_names())
      if (!eq.body_for(g))
        out.push_back("equation " + eq.target + ": no body for group " + g);
  }
  for (const auto& v : model.variables) {
    const int c = equation_count[v.name];
    if (c == 0) out.push_back("variable " + v.name + " has no equation");
    if (c > 1) out.push_back("variable " + v.name + " has more than one equation");
  }
}

// Evaluates every body on every parent x noise x unit-context combination.
void check_totality(const Model& model, std::vector<std::string>& out) {
  const auto& pop = model.population;
  for (const auto& eq : model.equations) {
    const VariableDecl* target = model.find_variable(eq.target);
    std::vector<const std::vector<Value>*> parent_domains;
    for (const auto& p : eq.parents) parent_domains.push_back(&model.find_variable(p)->domain);
    std::vector<const FinitePmf*> noise_pmfs;
    for (const auto& n : eq.noises) noise_pmfs.push_back(&model.find_noise(n)->pmf);
    const ExprScope scope = scope_for(model, eq);

    for (std::size_t g = 0; g < pop.group_names().size(); ++g) {
      const std::string& group = pop.group_names()[g];
      const Expr* body = eq.body_for(group);
      CompiledExpr program(*body, scope);
      // Distinct unit contexts that can change the body's value.
      std::vector<UnitId> units = pop.units_in(group);
      if (!uses_unit_id(*body)) {
        std::set<std::string> feats;
        body->collect_features(feats);
        std::set<std::vector<Value>> seen;
        std::vector<UnitId> distinct;
        for (UnitId u : units) {
          std::vector<Value> key;
          if (!feats.empty())
            key.assign(pop.features(u).begin(), pop.features(u).end());
          if (seen.insert(key).second) distinct.push_back(u);
        }
        units = std::move(distinct);
      }

      std::vector<Value> parents(eq.parents.size());
      std::vector<Value> noises(eq.noises.size());
      std::vector<std::size_t> pi(eq.parents.size(), 0), ni(eq.noises.size(), 0);
      bool reported = false;
      for (UnitId u : units) {
        UnitContext ctx{u, g, pop.features(u)};
        std::fill(pi.begin(), pi.end(), 0);
        while (!reported) {
          for (std::size_t k = 0; k < pi.size(); ++k) parents[k] = (*parent_domains[k])[pi[k]];
          std::fill(ni.begin(), ni.end(), 0);
          while (!reported) {
            for (std::size_t k = 0; k < ni.size(); ++k)
              noises[k] = noise_pmfs[k]->entries()[ni[k]].value;
            try {
              const Value v = program.evaluate(parents, noises, ctx);
              if (!in_domain(target->domain, v)) {
                out.push_back("equation " + eq.target + ": value " + v.to_string() +
                              " outside declared domain (group " + group + ")");
                reported = true;
              }
            } catch (const DomainError& e) {
              out.push_back("equation " + eq.target + ": " + e.what() + " (group " +
                            group + ")");
              reported = true;
            }
            std::size_t k = 0;
            while (k < ni.size() && ++ni[k] == noise_pmfs[k]->size()) ni[k++] = 0;
            if (k == ni.size()) break;
          }
          std::size_t k = 0;
          while (k < pi.size() && ++pi[k] == parent_domains[k]->size()) pi[k++] = 0;
          if (k == pi.size()) break;
        }
        if (reported) break;
      }
    }
  }
}

}  // namespace

ValidationReport validate_model(const Model& model) {
  ValidationReport report;
  check_structure(model, report.violations);
  std::vector<std::string> cycle;
  const auto order = order_slots(model, &cycle);
  if (order.size() != model.variables.size() && !cycle.empty())
    report.violations.push_back(describe_cycle(cycle));
  if (report.ok()) check_totality(model, report.violations);
  return report;
}

void require_valid(const Model& model) {
  const ValidationReport report = validate_model(model);
  if (!report.ok()) throw ValidationError("invalid model: " + report.summary());
}

std::vector<std::string> topological_order(const Model& model) {
  std::vector<std::string> cycle;
  const auto order = order_slots(model, &cycle);
  if (order.size() != model.variables.size()) throw ValidationError(describe_cycle(cycle));
  std::vector<std::string> names;
  for (std::size_t v : order) names.push_back(model.variables[v].name);
  return names;
}

std::map<std::string, Value> solve(const Model& model, UnitId unit,
                                   const std::map<std::string, Value>& noise) {
  const CompiledModel compiled(model);
  if (unit < 1 || unit > compiled.num_units())
    throw ValidationError("unit " + std::to_string(unit) + " outside population");
  std::vector<Value> noise_values(compiled.num_noises());
  for (std::size_t i = 0; i < compiled.num_noises(); ++i) {
    const NoiseDecl& decl = model.noises[i];
    auto it = noise.find(decl.name);
    if (it == noise.end()) throw ValidationError("missing value for noise " + decl.name);
    const auto& entries = decl.pmf.entries();
    if (std::none_of(entries.begin(), entries.end(),
                     [&](const PmfEntry& e) { return e.value == it->second; }))
      throw ValidationError("value " + it->second.to_string() + " outside domain of noise " +
                            decl.name);
    noise_values[i] = it->second;
  }
  for (const auto& [name, value] : noise)
    if (!model.find_noise(name)) throw ValidationError("unknown noise " + name);
  std::vector<Value> out(compiled.num_variables());
  compiled.solve(unit, noise_values, out);
  std::map<std::string, Value> result;
  for (std::size_t v = 0; v < out.size(); ++v) result.emplace(model.variables[v].name, out[v]);
  return result;
}

std::string counterfactual_noise_name(const std::string& noise,
                                      const Intervention& iv) {
  return noise + "[" + to_string(iv) + "]";
}

Model apply_do(const Model& model, const Intervention& iv) {
  for (const auto& [var, value] : iv) {
    const VariableDecl* decl = model.find_variable(var);
    if (!decl) throw ValidationError("intervention on unknown variable " + var);
    if (!in_domain(decl->domain, value))
      throw ValidationError("intervention value " + value.to_string() +
                            " outside domain of " + var);
  }
  Model sub = model;
  for (auto& eq : sub.equations) {
    auto it = iv.find(eq.target);
    if (it == iv.end()) continue;
    eq.parents.clear();
    eq.noises.clear();
    eq.bodies = {{kDefaultGroup, Expr::constant(it->second)}};
  }
  if (model.coupling == Coupling::Disco) {
    std::map<std::string, std::string> renamed;
    for (auto& n : sub.noises) {
      std::string fresh = counterfactual_noise_name(n.name, iv);
      renamed.emplace(n.name, fresh);
      n.name = std::move(fresh);
    }
    for (auto& eq : sub.equations) {
      for (auto& n : eq.noises) n = renamed.at(n);
      for (auto& [group, body] : eq.bodies) body = body.rename(renamed);
    }
  }
  return sub;
}

// --- CompiledModel ----------------------------------------------------------

CompiledModel::CompiledModel(Model model) : model_(std::move(model)) {
  require_valid(model_);
  const std::size_t nv = model_.variables.size();
  order_ = order_slots(model_, nullptr);
  parents_.resize(nv);
  equation_noises_.resize(nv);
  bodies_.resize(nv);
  const auto& groups = model_.population.group_names();
  bool any_unit_id = false;
  std::set<std::string> used_features;
  for (const auto& eq : model_.equations) {
    const std::size_t v = variable_index(eq.target);
    for (const auto& p : eq.parents) parents_[v].push_back(variable_index(p));
    for (const auto& n : eq.noises) equation_noises_[v].push_back(noise_index(n));
    // Bodies see the full variable/noise slot tables so that evaluation can
    // read straight from the solution and noise vectors.
    ExprScope scope;
    for (const auto& var : model_.variables) scope.variables.push_back(var.name);
    for (const auto& n : model_.noises) scope.noises.push_back(n.name);
    scope.groups = groups;
    scope.features = model_.population.feature_names();
    for (const auto& g : groups) {
      const Expr* body = eq.body_for(g);
      bodies_[v].emplace_back(*body, scope);
      any_unit_id = any_unit_id || uses_unit_id(*body);
      body->collect_features(used_features);
    }
  }

  const auto& pop = model_.population;
  unit_class_.resize(static_cast<std::size_t>(pop.count()));
  std::map<std::pair<std::size_t, std::vector<Value>>, std::size_t> classes;
  for (UnitId u = 1; u <= pop.count(); ++u) {
    const auto i = static_cast<std::size_t>(u - 1);
    if (any_unit_id) {
      unit_class_[i] = i;
      continue;
    }
    std::vector<Value> key;
    if (!used_features.empty()) key.assign(pop.features(u).begin(), pop.features(u).end());
    auto [it, fresh] = classes.emplace(std::make_pair(pop.group_of(u), std::move(key)),
                                       classes.size());
    unit_class_[i] = it->second;
  }
  num_classes_ = any_unit_id ? static_cast<std::size_t>(pop.count()) : classes.size();
}

std::size_t CompiledModel::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < model_.variables.size(); ++i)
    if (model_.variables[i].name == name) return i;
  return static_cast<std::size_t>(-1);
}

std::size_t CompiledModel::noise_index(const std::string& name) const {
  for (std::size_t i = 0; i < model_.noises.size(); ++i)
    if (model_.noises[i].name == name) return i;
  return static_cast<std::size_t>(-1);
}

std::size_t CompiledModel::domain_index(std::size_t var, const Value& v) const {
  const auto& d = model_.variables[var].domain;
  auto it = std::find(d.begin(), d.end(), v);
  return it == d.end() ? static_cast<std::size_t>(-1)
                       : static_cast<std::size_t>(it - d.begin());
}

std::vector<std::size_t> CompiledModel::ancestors(std::size_t var) const {
  std::vector<bool> mark(num_variables(), false);
  std::vector<std::size_t> stack(parents_[var].begin(), parents_[var].end());
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (mark[v]) continue;
    mark[v] = true;
    stack.insert(stack.end(), parents_[v].begin(), parents_[v].end());
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < mark.size(); ++v)
    if (mark[v]) out.push_back(v);
  return out;
}

std::vector<std::size_t> CompiledModel::ancestral_noises(
    const std::vector<std::size_t>& vars) const {
  std::vector<bool> var_mark(num_variables(), false);
  for (std::size_t v : vars) {
    var_mark[v] = true;
    for (std::size_t a : ancestors(v)) var_mark[a] = true;
  }
  std::vector<bool> noise_mark(num_noises(), false);
  for (std::size_t v = 0; v < var_mark.size(); ++v)
    if (var_mark[v])
      for (std::size_t n : equation_noises_[v]) noise_mark[n] = true;
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < noise_mark.size(); ++n)
    if (noise_mark[n]) out.push_back(n);
  return out;
}

UnitContext CompiledModel::context(UnitId unit) const {
  return UnitContext{unit, model_.population.group_of(unit), model_.population.features(unit)};
}

void CompiledModel::solve(UnitId unit, std::span<const Value> noise,
                          std::span<Value> out) const {
  const UnitContext ctx = context(unit);
  for (std::size_t v : order_) {
    const Value value = bodies_[v][ctx.group].evaluate(out, noise, ctx);
    if (domain_index(v, value) == static_cast<std::size_t>(-1))
      throw DomainError("equation " + model_.variables[v].name + " produced " +
                        value.to_string() + " outside its domain");
    out[v] = value;
  }
}

}  // namespace disco
