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
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "disco/value.hpp"

namespace disco {

enum class ExprOp {
  Const,
  Ident,    // parent variable or noise, resolved when compiled
  UnitId,   // `unit`
  InGroup,  // `in(G)`
  Feature,  // `feat(x)`
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  If,  // args: condition, then, else
  Min,
  Max,
  Clamp,  // args: x, lo, hi
  Ind,    // 1 if argument nonzero, else 0
};

// Immutable expression tree for structural-equation bodies.
//
// Comparisons and logical operators evaluate to 0 or 1; any nonzero value is
// true. Bodies are total: every operator is defined on every input except
// division by zero, which is an evaluation error.
class Expr {
 public:
  struct Node {
    ExprOp op = ExprOp::Const;
    Value value;       // Const
    std::string name;  // Ident, InGroup, Feature
    std::vector<Expr> args;
  };

  Expr() : Expr(constant(0)) {}

  static Expr constant(Value v);
  static Expr ident(std::string name);
  static Expr named(ExprOp op, std::string name);
  static Expr unit_id();
  static Expr apply(ExprOp op, std::vector<Expr> args);

  const Node& node() const { return *node_; }
  ExprOp op() const { return node_->op; }

  // Identifier names (parents and noises) referenced by the body.
  void collect_identifiers(std::set<std::string>& out) const;
  void collect_features(std::set<std::string>& out) const;
  void collect_groups(std::set<std::string>& out) const;

  // Replaces every identifier `name` by `replacement`.
  Expr substitute(const std::string& name, const Expr& replacement) const;
  Expr rename(const std::map<std::string, std::string>& names) const;

  // Canonical text; parse_expr(to_string()) yields an equal tree.
  std::string to_string() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Parses an expression body. `line`/`column` are used for error locations
// when the body is embedded in a larger file.
Expr parse_expr(std::string_view text, std::size_t line = 1,
                std::size_t column = 1);

// Per-unit context visible to an expression: unit id, group index and the
// unit's feature row.
struct UnitContext {
  std::int64_t unit = 0;
  std::size_t group = 0;
  std::span<const Value> features;
};

// Name resolution used when compiling an expression.
struct ExprScope {
  std::vector<std::string> variables;  // indexes into the variable slots
  std::vector<std::string> noises;     // indexes into the noise slots
  std::vector<std::string> groups;
  std::vector<std::string> features;
};

// An expression compiled to a flat stack program with resolved slots.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  // Throws ValidationError on unresolved names.
  CompiledExpr(const Expr& expr, const ExprScope& scope);

  Value evaluate(std::span<const Value> variables,
                 std::span<const Value> noises, const UnitContext& unit) const;

 private:
  enum class Code : std::uint8_t {
    Push,
    LoadVar,
    LoadNoise,
    LoadUnit,
    InGroup,
    LoadFeature,
    Neg,
    Not,
    Ind,
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Min,
    Max,
    Clamp,
    JumpIfZero,
    Jump,
  };
  struct Instr {
    Code code;
    std::int32_t arg = 0;
    Value constant{};
  };

  void emit(const Expr& expr, const ExprScope& scope);

  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

}  // namespace disco
