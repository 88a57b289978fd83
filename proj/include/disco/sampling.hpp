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

#include <cstdint>
#include <string>
#include <vector>

#include "disco/dataset.hpp"
#include "disco/model.hpp"
#include "disco/query.hpp"

namespace disco {

struct Estimate {
  double point = 0;
  double std_error = 0;
  std::int64_t n = 0;      // accepted samples
  std::int64_t draws = 0;  // including rejected ones
  std::uint64_t seed = 0;

  // Normal-approximation interval point ± z·std_error.
  double lower(double z = 1.96) const { return point - z * std_error; }
  double upper(double z = 1.96) const { return point + z * std_error; }
};

// Draws are split into fixed-size chunks; chunk i uses Rng(seed, i) and
// chunk results are combined in index order, so output does not depend on
// the thread count.
struct SamplingOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::int64_t chunk = 4096;
};

// n i.i.d. factual records: unit by weight, each noise by its pmf, solve.
Dataset sample_dataset(const Model& model, std::int64_t n, std::uint64_t seed,
                       const SamplingOptions& options = {}, std::string label = "");

// Exact observational table for a scenario providing counts
// ("paper200-table1", or "paper200" for the same table).
Dataset exact_table_dataset(const std::string& scenario);

// Rejection-samples the evidence in the factual world, then solves each
// counterfactual world with fresh noise (disco) or the factual noise (scm).
// `n` counts draws including rejected ones. Throws NullEventError when no
// draw satisfies the evidence.
Estimate mc_valuation(const Model& model, const Query& query, std::int64_t n,
                      std::uint64_t seed, const SamplingOptions& options = {});

// X = U + E1, Y = X + U + E2 with standard normal noise and a finite set of
// unit values u (unit k has u = unit_values[k-1]). No exact engine exists
// for it.
struct LinearGaussianModel {
  std::vector<double> unit_values;
};
LinearGaussianModel linear_gaussian_default();

// Supports E[X[...] ...] and E[Y[...] ...] with interventions on X and/or Y
// and an optional unit or whole-population restriction; evidence is
// rejected. Counterfactual worlds draw fresh noise.
Estimate mc_linear_gaussian(const LinearGaussianModel& model, const Query& query,
                            std::int64_t n, std::uint64_t seed,
                            const SamplingOptions& options = {});

}  // namespace disco
