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

#include <sstream>

#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "disco/optimizer.hpp"
#include "disco/sampling.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"

using namespace disco;

namespace {

// One treatment arm per user.
AllocationProblem binary(const std::vector<int>& costs, const std::vector<int>& taus, int budget) {
  AllocationProblem p;
  p.arm_values = {Value(0), Value(1)};
  for (std::size_t i = 0; i < costs.size(); ++i) {
    p.users.push_back(static_cast<UnitId>(i + 1));
    p.tau.push_back({0, taus[i]});
    p.cost.push_back({0, costs[i]});
    p.offered.push_back({true, true});
  }
  p.budget = budget;
  return p;
}

bool feasible(const AllocationProblem& p, const Policy& pol) {
  Rational cost = 0;
  for (std::size_t i = 0; i < p.users.size(); ++i) {
    if (!p.offered[i][pol.assignment[i]]) return false;
    cost += p.cost[i][pol.assignment[i]];
  }
  return cost <= p.budget && cost == pol.total_cost;
}

}  // namespace

TEST_CASE("greedy takes the dominant ratio") {
  const Policy p = allocate_greedy(binary({1, 1}, {5, 3}, 1));
  CHECK(p.assignment == std::vector<std::size_t>{1, 0});
  CHECK(p.expected_uplift == 5);
}

TEST_CASE("zero budget keeps everyone in control") {
  for (const Policy& p : {allocate_greedy(binary({1, 2}, {5, 3}, 0)),
                          allocate_exact(binary({1, 2}, {5, 3}, 0))}) {
    CHECK(p.assignment == std::vector<std::size_t>{0, 0});
    CHECK(p.expected_uplift == 0);
  }
}

TEST_CASE("ample budget gives the per-user best arm") {
  AllocationProblem p;
  p.arm_values = {Value(0), Value(1), Value(2)};
  p.users = {1, 2, 3};
  p.tau = {{0, 3, 4}, {0, 5, 1}, {0, -1, -2}};
  p.cost = {{0, 1, 5}, {0, 2, 1}, {0, 1, 1}};
  p.offered = {{true, true, true}, {true, true, true}, {true, true, true}};
  p.budget = 100;
  const std::vector<std::size_t> best{2, 1, 0};
  CHECK(allocate_greedy(p).assignment == best);
  CHECK(allocate_exact(p).assignment == best);
}

TEST_CASE("exact beats greedy where ratios mislead") {
  const AllocationProblem p = binary({3, 3, 3}, {5, 5, 4}, 6);
  const Policy e = allocate_exact(p);
  CHECK(e.assignment == std::vector<std::size_t>{1, 1, 0});
  CHECK(e.expected_uplift == 10);

  const AllocationProblem q = binary({1, 4}, {2, 6}, 4);
  CHECK(allocate_greedy(q).expected_uplift == 2);
  CHECK(allocate_exact(q).expected_uplift == 6);
}

TEST_CASE("allocators against enumeration on random instances") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const AllocationProblem p = testing::random_allocation(seed, 8, 3);
    CAPTURE(seed);
    const auto [uplift, cost] = testing::brute_force_allocation(p);
    const Policy e = allocate_exact(p);
    CHECK(e.expected_uplift == uplift);
    CHECK(e.total_cost == cost);
    CHECK(feasible(p, e));
    const Policy g = allocate_greedy(p);
    CHECK(feasible(p, g));
    CHECK(g.expected_uplift <= uplift);
  }
}

TEST_CASE("exact allocator refuses huge instances") {
  AllocationProblem p;
  p.arm_values = {Value(0), Value(1), Value(2)};
  for (int i = 0; i < 40; ++i) {
    p.users.push_back(i + 1);
    p.tau.push_back({0, Rational(1 + i, 7 + i), Rational(3 + 2 * i, 5 + i)});
    p.cost.push_back({0, Rational(1, 1 + i), Rational(2 + i, 3 + i)});
    p.offered.push_back({true, true, true});
  }
  p.budget = 10;
  try {
    (void)allocate_exact(p, 1000);
    FAIL("expected a size error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("greedy") != std::string::npos);
  }
}

TEST_CASE("tau from the exact engine") {
  const Model m = *builtin("paper200").model;
  ExactEngine engine(m);
  const AllocationProblem p = exact_tau_problem(engine, {1, 150}, "T", "Y");
  CHECK(p.arm_values == std::vector<Value>{Value(-1), Value(1)});
  CHECK(p.tau[0][1] == 4);
  CHECK(p.tau[1][1] == 2);

  const Model flat = load_model_text("[units]\ncount: 2\n[noise N]\npmf: 0:1/2 1:1/2\n"
                                     "[noise M]\npmf: 0:1/4 1:3/4\n"
                                     "[var T]\ndomain: 0 1\n[var Y]\ndomain: 0 1\n"
                                     "[eq T]\n*: N\n[eq Y]\n*: M\n");
  ExactEngine fe(flat);
  const AllocationProblem z = exact_tau_problem(fe, {1, 2}, "T", "Y");
  for (const auto& row : z.tau)
    for (const auto& t : row) CHECK(t == 0);
}

TEST_CASE("incentive tau matches per-unit enumeration") {
  const Model m = *builtin("incentive").model;
  ExactEngine engine(m);
  std::vector<UnitId> users;
  for (UnitId u = 1; u <= 30; ++u) users.push_back(u);
  const AllocationProblem p = exact_tau_problem(engine, users, "T", "Y");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const UnitId u = users[i];
    // Units of one class share x and the group, so the class average is
    // the unit's own effect.
    const Rational want = testing::oracle_individual(m, u, parse_query("E[Y[T=1]]")) -
                          testing::oracle_individual(m, u, parse_query("E[Y[T=0]]"));
    CHECK(p.tau[i][1] == want);
  }
}

TEST_CASE("empirical tau from a sample") {
  const Model m = *builtin("paper200-sprime").model;
  const Dataset d = sample_dataset(m, 20000, 5);
  std::vector<UnitId> users;
  for (UnitId u = 1; u <= 10; ++u) users.push_back(u);
  const AllocationProblem p = empirical_tau_problem(d, m, users, "T", "Y");
  CHECK(std::abs(p.tau[0][1].get_d() - 2.0) < 0.1);
  const Dataset tiny = sample_dataset(m, 1, 5);
  CHECK_THROWS_AS(empirical_tau_problem(tiny, m, users, "T", "Y"), DomainError);
}

TEST_CASE("costs csv, evaluation and output") {
  const Model m = *builtin("incentive").model;
  ExactEngine engine(m);
  AllocationProblem p = exact_tau_problem(engine, {1, 2, 3}, "T", "Y");
  std::istringstream costs("unit,treatment,cost\n1,1,2\n2,1,1\n");
  apply_costs_csv(p, costs);
  CHECK(p.offered[0][1]);
  CHECK_FALSE(p.offered[2][1]);
  CHECK(p.cost[0][1] == 2);
  p.budget = 2;
  const Policy pol = allocate_exact(p);
  CHECK(feasible(p, pol));
  Rational want = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string arm = p.arm_values[pol.assignment[i]].to_string();
    want += m.population.weight(p.users[i]) *
            testing::oracle_individual(m, p.users[i], parse_query("E[Y[T=" + arm + "]]"));
  }
  CHECK(evaluate_policy(engine, p, pol, "T", "Y") == want);

  Policy over = make_policy(p, {1, 1, 0});
  CHECK_THROWS_AS(evaluate_policy(engine, p, over, "T", "Y"), DomainError);
  p.budget = 100;
  Policy withheld = make_policy(p, {0, 0, 1});
  CHECK_THROWS_AS(evaluate_policy(engine, p, withheld, "T", "Y"), DomainError);

  std::ostringstream csv;
  write_policy_csv(p, pol, csv);
  CHECK(csv.str().rfind("unit,treatment\n1,", 0) == 0);
  const auto j = nlohmann::json::parse(policy_summary_json(pol));
  CHECK(j.contains("cost"));
  CHECK(j.contains("expected_uplift"));

  std::istringstream bad("1,7,1\n");
  CHECK_THROWS_AS(apply_costs_csv(p, bad), ParseError);
}

TEST_CASE("complier scores replace tau") {
  const Model m = *builtin("incentive").model;
  ExactEngine engine(m);
  AllocationProblem p = exact_tau_problem(engine, {5}, "T", "Y");
  use_complier_scores(p, engine, "T", "Y");
  CHECK(p.tau[0][1] == Rational(27, 50));
}
