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
#include <string>
#include <vector>

#include "disco/dataset.hpp"
#include "disco/exact.hpp"
#include "disco/sampling.hpp"

namespace disco {

// Both sides of an identity, computed exactly.
struct IdentityReport {
  std::string name;
  Rational lhs;
  Rational rhs;
  std::vector<std::string> notes;

  bool holds() const { return lhs == rhs; }
  std::string summary() const;
};

// P(T=t | u) for every unit.
std::map<UnitId, Rational> propensities(ExactEngine& engine, const std::string& treatment,
                                        Value t);

// Throws PositivityError naming the groups and units with P(T=t | u) = 0.
void require_positivity(ExactEngine& engine, const std::string& treatment, Value t);

// E[Y^d(t*)] against E[Y·1{T=t*} / P(t*|U)].
IdentityReport ipw_ate_check(const Model& model, const std::string& treatment,
                             const std::string& outcome, Value t_star);

// Sample mean of Y·1{T=t*} / P(t*|u); `propensity` maps unit to P(t*|u).
Estimate ipw_ate_estimate(const Dataset& data, const std::map<UnitId, Rational>& propensity,
                          const std::string& treatment, const std::string& outcome,
                          Value t_star);

// Throws DomainError unless X's equation reads no variables and, when X is
// random given the unit, X is not an ancestor of T or Y.
void require_feature_independence(ExactEngine& engine, const std::string& feature,
                                  const std::string& treatment, const std::string& outcome);

// E[Y^d(t') | X=x'] against E[Y·1{T=t', X=x'} / (P(t'|U) P(x'))].
IdentityReport ipw_conditional_check(const Model& model, const std::string& treatment,
                                     const std::string& feature, const std::string& outcome,
                                     Value t_prime, Value x_prime);

// E[Y^d(t) | X=x, T=t, Y=y] against
// E[Y·1{T=t, X=x} / P(t,x) · P(y|t;U) / P(y|t,x)]. Disco coupling only.
IdentityReport ipw_posttreatment_check(const Model& model, const std::string& treatment,
                                       const std::string& feature, const std::string& outcome,
                                       Value x, Value t, Value y);

}  // namespace disco
