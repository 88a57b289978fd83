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
#include <span>
#include <string>
#include <vector>

#include "disco/expr.hpp"
#include "disco/model.hpp"

namespace disco {

// A validated model with names resolved to slots, ready for repeated
// solving. Variable slots follow declaration order; noise slots follow the
// model's noise declaration order.
class CompiledModel {
 public:
  // Throws ValidationError when `model` is invalid.
  explicit CompiledModel(Model model);

  const Model& model() const { return model_; }
  std::size_t num_variables() const { return model_.variables.size(); }
  std::size_t num_noises() const { return model_.noises.size(); }
  std::int64_t num_units() const { return model_.population.count(); }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Slot of a variable or noise; npos when absent.
  std::size_t variable_index(const std::string& name) const;
  std::size_t noise_index(const std::string& name) const;

  const std::vector<Value>& domain(std::size_t var) const {
    return model_.variables[var].domain;
  }
  std::size_t domain_index(std::size_t var, const Value& v) const;

  const FinitePmf& noise_pmf(std::size_t noise) const {
    return model_.noises[noise].pmf;
  }

  // Variable slots in topological order.
  const std::vector<std::size_t>& order() const { return order_; }

  // Noise slots feeding the given variables or any of their ancestors, in
  // slot order.
  std::vector<std::size_t> ancestral_noises(
      const std::vector<std::size_t>& vars) const;
  // Endogenous ancestors of a variable (excluding itself).
  std::vector<std::size_t> ancestors(std::size_t var) const;
  const std::vector<std::size_t>& parents(std::size_t var) const {
    return parents_[var];
  }
  const std::vector<std::size_t>& equation_noises(std::size_t var) const {
    return equation_noises_[var];
  }

  UnitContext context(UnitId unit) const;

  // Units sharing a class solve identically for every noise assignment.
  std::size_t unit_class(UnitId unit) const {
    return unit_class_[static_cast<std::size_t>(unit - 1)];
  }
  std::size_t num_unit_classes() const { return num_classes_; }

  // Solves every variable into `out` (size num_variables()). `noise` holds
  // one value per noise slot. Throws DomainError when a body's result is
  // outside its target domain.
  void solve(UnitId unit, std::span<const Value> noise,
             std::span<Value> out) const;

 private:
  Model model_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> equation_noises_;
  // bodies_[var][group]
  std::vector<std::vector<CompiledExpr>> bodies_;
  std::vector<std::size_t> unit_class_;
  std::size_t num_classes_ = 0;
};

}  // namespace disco
