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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "disco/dataset.hpp"
#include "disco/exact.hpp"

namespace disco {

// Users × arms. Arm 0 is control; arm j stands for treatment value
// arm_values[j]. tau[i][j] and cost[i][j] belong to users[i]; an arm a user
// cannot receive has no cost (`offered[i][j] == false`).
struct AllocationProblem {
  std::vector<UnitId> users;
  std::vector<Value> arm_values;
  std::vector<std::vector<Rational>> tau;
  std::vector<std::vector<Rational>> cost;
  std::vector<std::vector<bool>> offered;
  Rational budget = 0;

  std::size_t num_arms() const { return arm_values.size(); }
  std::vector<std::string> problems() const;
};

struct Policy {
  std::vector<std::size_t> assignment;  // arm per user, aligned with users
  Rational total_cost = 0;
  Rational expected_uplift = 0;
};

// Fills tau with exact conditional effects E[Y^d(arm j) − Y^d(arm 0)] over
// each user's unit class (units sharing group and the features the model
// reads). Costs are left at zero and every arm offered.
AllocationProblem exact_tau_problem(ExactEngine& engine, const std::vector<UnitId>& users,
                                    const std::string& treatment, const std::string& outcome);

// Same layout, with tau from arm-mean differences per (group, features)
// stratum of the dataset. Throws DomainError for a stratum with an empty
// arm.
AllocationProblem empirical_tau_problem(const Dataset& data, const Model& model,
                                        const std::vector<UnitId>& users,
                                        const std::string& treatment,
                                        const std::string& outcome);

// Replaces tau by the complier score P(Y^d(arm 0)=lo, Y^d(arm j)=hi; u),
// lo/hi the smallest and largest outcome values.
void use_complier_scores(AllocationProblem& problem, ExactEngine& engine,
                         const std::string& treatment, const std::string& outcome);

// Costs CSV `unit,treatment,cost`; treatment is a treatment value. Arms
// without a row are not offered (control is always offered at cost 0).
void apply_costs_csv(AllocationProblem& problem, std::istream& in);

// Ratio greedy over each user's upgrade path (the upper concave hull of its
// (cost, tau) points): upgrades are taken in order of Δtau/Δcost, ties to
// lower Δcost then lower unit id, while the budget allows.
Policy allocate_greedy(const AllocationProblem& problem);

// Exact optimum by dynamic programming over the Pareto frontier of
// (cost, uplift) partial assignments. Ties go to lower cost. Throws
// DomainError when the frontier grows past `max_states`.
Policy allocate_exact(const AllocationProblem& problem, std::size_t max_states = 2000000);

// Σ_u weight(u) · E[Y^d(T = arm value of u); u]. Throws DomainError when the
// policy costs more than the budget or assigns an arm not offered.
Rational evaluate_policy(ExactEngine& engine, const AllocationProblem& problem,
                         const Policy& policy, const std::string& treatment,
                         const std::string& outcome);

// Recomputes cost and uplift of an assignment.
Policy make_policy(const AllocationProblem& problem, std::vector<std::size_t> assignment);

void write_policy_csv(const AllocationProblem& problem, const Policy& policy, std::ostream& out);
std::string policy_summary_json(const Policy& policy);

}  // namespace disco
