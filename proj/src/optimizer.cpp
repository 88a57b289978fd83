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

#include "disco/optimizer.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "disco/error.hpp"
#include "json.hpp"

namespace disco {
namespace {

std::vector<Value> arms_of(const Model& model, const std::string& treatment) {
  const VariableDecl* decl = model.find_variable(treatment);
  if (!decl) throw ValidationError("undeclared variable " + treatment);
  std::vector<Value> arms = decl->domain;
  std::sort(arms.begin(), arms.end());
  return arms;
}

AllocationProblem blank_problem(const std::vector<UnitId>& users, std::vector<Value> arms) {
  AllocationProblem p;
  p.users = users;
  p.arm_values = std::move(arms);
  const std::size_t k = p.arm_values.size();
  p.tau.assign(users.size(), std::vector<Rational>(k, Rational(0)));
  p.cost.assign(users.size(), std::vector<Rational>(k, Rational(0)));
  p.offered.assign(users.size(), std::vector<bool>(k, true));
  return p;
}

struct Upgrade {
  bool free = false;  // zero extra cost
  Rational ratio;
  Rational dcost;
  std::size_t user = 0;
  std::size_t arm = 0;
};

// Upper concave hull of a user's offered (cost, tau) points starting at
// control. Collinear points are skipped so ratios strictly decrease.
std::vector<Upgrade> upgrade_path(const AllocationProblem& p, std::size_t i) {
  std::vector<Upgrade> path;
  std::size_t cur = 0;
  for (;;) {
    std::optional<Upgrade> best;
    Rational best_dtau;
    for (std::size_t j = 1; j < p.num_arms(); ++j) {
      if (!p.offered[i][j] || j == cur) continue;
      const Rational dt = p.tau[i][j] - p.tau[i][cur];
      const Rational dc = p.cost[i][j] - p.cost[i][cur];
      if (dt <= 0 || dc < 0) continue;
      Upgrade u{dc == 0, dc == 0 ? Rational(0) : Rational(dt / dc), dc, i, j};
      bool better = false;
      if (!best) {
        better = true;
      } else if (u.free != best->free) {
        better = u.free;
      } else if (u.free) {
        better = dt > best_dtau;
      } else if (u.ratio != best->ratio) {
        better = u.ratio > best->ratio;
      } else {
        better = dc > best->dcost;  // farther point on a tie keeps ratios strict
      }
      if (better) {
        best = u;
        best_dtau = dt;
      }
    }
    if (!best) return path;
    path.push_back(*best);
    cur = best->arm;
  }
}

}  // namespace

std::vector<std::string> AllocationProblem::problems() const {
  std::vector<std::string> out;
  const std::size_t n = users.size();
  if (arm_values.empty()) out.push_back("no arms");
  if (tau.size() != n || cost.size() != n || offered.size() != n)
    out.push_back("tau/cost tables do not match the user list");
  if (budget < 0) out.push_back("negative budget");
  for (std::size_t i = 0; i < std::min({n, tau.size(), cost.size(), offered.size()}); ++i) {
    if (tau[i].size() != num_arms() || cost[i].size() != num_arms() ||
        offered[i].size() != num_arms()) {
      out.push_back("user " + std::to_string(users[i]) + ": wrong number of arms");
      continue;
    }
    if (cost[i][0] != 0) out.push_back("user " + std::to_string(users[i]) + ": control cost must be 0");
    if (tau[i][0] != 0) out.push_back("user " + std::to_string(users[i]) + ": control uplift must be 0");
    for (std::size_t j = 0; j < num_arms(); ++j)
      if (cost[i][j] < 0) out.push_back("user " + std::to_string(users[i]) + ": negative cost");
  }
  return out;
}

AllocationProblem exact_tau_problem(ExactEngine& engine, const std::vector<UnitId>& users,
                                    const std::string& treatment, const std::string& outcome) {
  AllocationProblem p = blank_problem(users, arms_of(engine.model(), treatment));
  std::map<std::size_t, std::vector<Rational>> by_class;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::size_t c = engine.compiled().unit_class(users[i]);
    auto it = by_class.find(c);
    if (it == by_class.end()) {
      std::vector<Rational> row(p.num_arms(), Rational(0));
      const Rational base = engine.expectation(users[i], {{treatment, p.arm_values[0]}}, outcome);
      for (std::size_t j = 1; j < p.num_arms(); ++j)
        row[j] = engine.expectation(users[i], {{treatment, p.arm_values[j]}}, outcome) - base;
      it = by_class.emplace(c, std::move(row)).first;
    }
    p.tau[i] = it->second;
  }
  return p;
}

AllocationProblem empirical_tau_problem(const Dataset& data, const Model& model,
                                        const std::vector<UnitId>& users,
                                        const std::string& treatment,
                                        const std::string& outcome) {
  AllocationProblem p = blank_problem(users, arms_of(model, treatment));
  const auto& pop = model.population;
  using Stratum = std::pair<std::size_t, std::vector<Value>>;
  auto stratum_of = [&](UnitId u) {
    const auto f = pop.features(u);
    return Stratum{pop.group_of(u), std::vector<Value>(f.begin(), f.end())};
  };
  const std::size_t tc = data.column(treatment);
  const std::size_t yc = data.column(outcome);
  // stratum -> arm -> (sum, count)
  std::map<Stratum, std::vector<std::pair<Rational, std::int64_t>>> cells;
  for (const auto& rec : data.records) {
    if (rec.unit < 1 || rec.unit > pop.count())
      throw ValidationError("dataset unit " + std::to_string(rec.unit) + " outside population");
    auto arm = std::find(p.arm_values.begin(), p.arm_values.end(), rec.values[tc]);
    if (arm == p.arm_values.end()) continue;
    auto& row = cells[stratum_of(rec.unit)];
    row.resize(p.num_arms(), {Rational(0), 0});
    auto& cell = row[static_cast<std::size_t>(arm - p.arm_values.begin())];
    cell.first += to_rational(rec.values[yc]);
    ++cell.second;
  }
  for (std::size_t i = 0; i < users.size(); ++i) {
    const Stratum s = stratum_of(users[i]);
    auto it = cells.find(s);
    std::string label = "group " + pop.group_name_of(users[i]);
    for (const auto& v : s.second) label += " " + v.to_string();
    if (it == cells.end()) throw DomainError("stratum (" + label + ") has no records");
    for (std::size_t j = 0; j < p.num_arms(); ++j)
      if (it->second[j].second == 0)
        throw DomainError("stratum (" + label + ") has no records with " + treatment + "=" +
                          p.arm_values[j].to_string());
    const Rational base = it->second[0].first / it->second[0].second;
    for (std::size_t j = 1; j < p.num_arms(); ++j) {
      p.tau[i][j] = it->second[j].first / it->second[j].second - base;
      p.tau[i][j].canonicalize();
    }
  }
  return p;
}

void use_complier_scores(AllocationProblem& problem, ExactEngine& engine,
                         const std::string& treatment, const std::string& outcome) {
  const VariableDecl* y = engine.model().find_variable(outcome);
  if (!y) throw ValidationError("undeclared variable " + outcome);
  const Value lo = *std::min_element(y->domain.begin(), y->domain.end());
  const Value hi = *std::max_element(y->domain.begin(), y->domain.end());
  for (std::size_t i = 0; i < problem.users.size(); ++i)
    for (std::size_t j = 1; j < problem.num_arms(); ++j)
      problem.tau[i][j] = complier_probability(engine, problem.users[i], treatment,
                                               problem.arm_values[0], problem.arm_values[j],
                                               outcome, lo, hi);
}

void apply_costs_csv(AllocationProblem& problem, std::istream& in) {
  std::map<UnitId, std::size_t> index;
  for (std::size_t i = 0; i < problem.users.size(); ++i) index[problem.users[i]] = i;
  for (auto& row : problem.offered) std::fill(row.begin() + 1, row.end(), false);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (line_no == 1 && !cells.empty() && cells[0] == "unit") continue;
    if (cells.size() != 3) throw ParseError("expected unit,treatment,cost", line_no, 1);
    Value unit, t, c;
    if (!Value::try_parse(cells[0], unit) || !unit.is_integer())
      throw ParseError("bad unit '" + cells[0] + "'", line_no, 1);
    if (!Value::try_parse(cells[1], t)) throw ParseError("bad treatment '" + cells[1] + "'", line_no, 2);
    if (!Value::try_parse(cells[2], c) || c < 0)
      throw ParseError("bad cost '" + cells[2] + "'", line_no, 3);
    auto u = index.find(unit.num());
    if (u == index.end()) continue;
    auto arm = std::find(problem.arm_values.begin(), problem.arm_values.end(), t);
    if (arm == problem.arm_values.end())
      throw ParseError("treatment " + t.to_string() + " is not an arm", line_no, 2);
    const auto j = static_cast<std::size_t>(arm - problem.arm_values.begin());
    if (j == 0 && !c.is_zero()) throw ParseError("control must cost 0", line_no, 3);
    problem.cost[u->second][j] = to_rational(c);
    problem.offered[u->second][j] = true;
  }
}

Policy make_policy(const AllocationProblem& problem, std::vector<std::size_t> assignment) {
  Policy p;
  p.assignment = std::move(assignment);
  for (std::size_t i = 0; i < p.assignment.size(); ++i) {
    p.total_cost += problem.cost[i][p.assignment[i]];
    p.expected_uplift += problem.tau[i][p.assignment[i]];
  }
  p.total_cost.canonicalize();
  p.expected_uplift.canonicalize();
  return p;
}

Policy allocate_greedy(const AllocationProblem& problem) {
  if (auto issues = problem.problems(); !issues.empty()) throw ValidationError(issues.front());
  std::vector<Upgrade> all;
  for (std::size_t i = 0; i < problem.users.size(); ++i)
    for (auto& u : upgrade_path(problem, i)) all.push_back(std::move(u));
  std::stable_sort(all.begin(), all.end(), [&](const Upgrade& a, const Upgrade& b) {
    if (a.free != b.free) return a.free;
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    if (a.dcost != b.dcost) return a.dcost < b.dcost;
    return problem.users[a.user] < problem.users[b.user];
  });
  std::vector<std::size_t> assignment(problem.users.size(), 0);
  std::vector<bool> blocked(problem.users.size(), false);
  Rational spent = 0;
  for (const auto& u : all) {
    if (blocked[u.user]) continue;
    if (spent + u.dcost <= problem.budget) {
      spent += u.dcost;
      assignment[u.user] = u.arm;
    } else {
      blocked[u.user] = true;  // later steps build on this one
    }
  }
  return make_policy(problem, std::move(assignment));
}

Policy allocate_exact(const AllocationProblem& problem, std::size_t max_states) {
  if (auto issues = problem.problems(); !issues.empty()) throw ValidationError(issues.front());
  struct State {
    Rational cost, uplift;
    std::size_t parent;
    std::size_t arm;
  };
  std::vector<std::vector<State>> layers;
  std::vector<State> frontier{{Rational(0), Rational(0), 0, 0}};
  for (std::size_t i = 0; i < problem.users.size(); ++i) {
    std::vector<State> next;
    for (std::size_t s = 0; s < frontier.size(); ++s)
      for (std::size_t j = 0; j < problem.num_arms(); ++j) {
        if (!problem.offered[i][j]) continue;
        Rational c = frontier[s].cost + problem.cost[i][j];
        if (c > problem.budget) continue;
        next.push_back({std::move(c), frontier[s].uplift + problem.tau[i][j], s, j});
      }
    std::stable_sort(next.begin(), next.end(), [](const State& a, const State& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      return a.uplift > b.uplift;
    });
    std::vector<State> kept;
    for (auto& st : next)
      if (kept.empty() || st.uplift > kept.back().uplift) kept.push_back(std::move(st));
    if (kept.size() > max_states)
      throw DomainError("instance too large for the exact allocator (" +
                        std::to_string(kept.size()) + " frontier states); use greedy");
    layers.push_back(std::move(frontier));
    frontier = std::move(kept);
  }
  // The frontier has strictly increasing uplift in cost: the last state is
  // the optimum at the lowest cost reaching it.
  std::vector<std::size_t> assignment(problem.users.size(), 0);
  std::size_t s = frontier.size() - 1;
  for (std::size_t i = problem.users.size(); i-- > 0;) {
    const State& st = i + 1 == problem.users.size() ? frontier[s] : layers[i + 1][s];
    assignment[i] = st.arm;
    s = st.parent;
  }
  return make_policy(problem, std::move(assignment));
}

Rational evaluate_policy(ExactEngine& engine, const AllocationProblem& problem,
                         const Policy& policy, const std::string& treatment,
                         const std::string& outcome) {
  if (policy.assignment.size() != problem.users.size())
    throw ValidationError("policy does not cover every user");
  const Policy recomputed = make_policy(problem, policy.assignment);
  if (recomputed.total_cost > problem.budget)
    throw DomainError("infeasible policy: cost " + fraction_string(recomputed.total_cost) +
                      " exceeds budget " + fraction_string(problem.budget));
  Rational total = 0;
  const auto& pop = engine.model().population;
  for (std::size_t i = 0; i < problem.users.size(); ++i) {
    const std::size_t j = policy.assignment[i];
    if (j >= problem.num_arms() || !problem.offered[i][j])
      throw DomainError("policy assigns an arm not offered to unit " +
                        std::to_string(problem.users[i]));
    total += pop.weight(problem.users[i]) *
             engine.expectation(problem.users[i], {{treatment, problem.arm_values[j]}}, outcome);
  }
  total.canonicalize();
  return total;
}

void write_policy_csv(const AllocationProblem& problem, const Policy& policy, std::ostream& out) {
  out << "unit,treatment\n";
  for (std::size_t i = 0; i < problem.users.size(); ++i)
    out << problem.users[i] << ',' << problem.arm_values[policy.assignment[i]].to_csv_string()
        << '\n';
}

std::string policy_summary_json(const Policy& policy) {
  nlohmann::ordered_json j;
  j["cost"] = fraction_string(policy.total_cost);
  j["expected_uplift"] = fraction_string(policy.expected_uplift);
  return j.dump();
}

}  // namespace disco
