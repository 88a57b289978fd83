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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "disco/exact.hpp"

namespace disco {

struct CheckReport {
  std::string name;
  std::size_t checked = 0;
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  bool passed() const { return failures.empty(); }
  // "name: N checks, M failures" followed by failures and notes, one per line.
  std::string summary() const;
};

// Builds the engine used for one side of a dual-mode comparison. Tests
// substitute a deliberately wrong engine to prove mismatches are caught.
using EngineFactory = std::function<std::unique_ptr<ExactEngine>(const Model&)>;
EngineFactory default_engine_factory();

// Every Layer-1 query P(V=v | W=w; u) and Layer-2 query P(V^d(iv)=v; u) with
// empty or single-variable interventions agrees between disco and scm
// coupling, for every unit class.
CheckReport verify_layer12_equivalence(const Model& model,
                                       const EngineFactory& factory = {});

// With point-mass noise, two-world joints and evidence-conditioned
// counterfactuals agree between the couplings. Throws DomainError when a
// noise is not a point mass.
CheckReport verify_degenerate_l3_equivalence(const Model& model,
                                             const EngineFactory& factory = {});

// P(Y=y; u) = Σ_x P(X=x; u) P(Y^d(x)=y; u) for a binary treatment.
CheckReport verify_mixture_lemma(const Model& model, const std::string& treatment,
                                 const std::string& outcome);

// P(Y^d(x)=y | e; u) = P(Y=y | X=x; u) for evidence e containing X=x, in
// disco coupling.
CheckReport verify_consistency_equivalence(const Model& model, const std::string& treatment,
                                           const std::string& outcome);

// For each propensity stratum p = P(T=t1; u) and each y with positive mass,
// P(T=t1 | Y^d(t)=y, e(U)=p) = p. t1 is the larger treatment value. The
// unconditional ratios are listed in the notes.
CheckReport check_propensity_independence(const Model& model, const std::string& treatment,
                                          const std::string& outcome, Value t);

// Throws DomainError unless `var` has exactly two domain values.
void require_binary(const Model& model, const std::string& var);

// True when P(var = v; u) ∈ {0, 1} for every unit and value.
bool is_unit_deterministic(ExactEngine& engine, const std::string& var);

// The identities tying an interventional world to factual conditioning need
// every ancestor of the treatment to be fixed by the unit. Throws
// DomainError naming the first random ancestor.
void require_deterministic_ancestors(ExactEngine& engine, const std::string& treatment);

}  // namespace disco
