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

#include <vector>

#include "disco/error.hpp"
#include "disco/expr.hpp"
#include "disco/value.hpp"
#include "doctest.h"

using disco::CompiledExpr;
using disco::DomainError;
using disco::Expr;
using disco::ExprScope;
using disco::UnitContext;
using disco::Value;

namespace {

Value eval(const std::string& text, std::vector<Value> vars = {}, std::vector<Value> noises = {},
           UnitContext unit = {}) {
  ExprScope scope;
  scope.variables = {"A", "B"};
  scope.noises = {"N"};
  scope.groups = {"g1", "g2"};
  scope.features = {"f"};
  vars.resize(2);
  noises.resize(1);
  CompiledExpr c(disco::parse_expr(text), scope);
  return c.evaluate(vars, noises, unit);
}

}  // namespace

TEST_CASE("value normalizes sign and gcd") {
  CHECK(Value(2, -4) == Value(-1, 2));
  CHECK(Value(6, 3).is_integer());
  CHECK(Value(-3, 9).to_string() == "-1/3");
  CHECK(Value(1, 3) + Value(1, 6) == Value(1, 2));
  CHECK(Value(3, 4) * Value(-2) == Value(-3, 2));
  CHECK(Value(1) / Value(3) == Value(1, 3));
  CHECK(Value(1, 3) < Value(1, 2));
}

TEST_CASE("value parse and csv rendering") {
  CHECK(Value::parse("-7") == Value(-7));
  CHECK(Value::parse("3/6") == Value(1, 2));
  CHECK(Value::parse("-0.25") == Value(-1, 4));
  CHECK(Value(1, 4).to_csv_string() == "0.25");
  CHECK(Value(1, 3).to_csv_string() == "1/3");
  Value out;
  CHECK_FALSE(Value::try_parse("abc", out));
  CHECK_THROWS_AS((void)(Value(1) / Value(0)), DomainError);
  CHECK_THROWS_AS((void)(Value(INT64_MAX) + Value(1)), DomainError);
  CHECK_THROWS_AS((void)(Value(INT64_MAX / 2) * Value(4)), DomainError);
}

TEST_CASE("expression operators") {
  CHECK(eval("1 + 2 * 3") == Value(7));
  CHECK(eval("(1 + 2) * 3") == Value(9));
  CHECK(eval("7 / 2") == Value(7, 2));
  CHECK(eval("-A + B", {Value(2), Value(5)}) == Value(3));
  CHECK(eval("A == 2 && B != 2", {Value(2), Value(5)}) == Value(1));
  CHECK(eval("!(A < B) || A >= B", {Value(2), Value(5)}) == Value(0));
  CHECK(eval("if N <= 3 then 10 else 20", {}, {Value(3)}) == Value(10));
  CHECK(eval("if N <= 3 then 10 else 20", {}, {Value(4)}) == Value(20));
  CHECK(eval("min(3, min(A, 1))", {Value(0)}) == Value(0));
  CHECK(eval("max(3, 1/2)") == Value(3));
  CHECK(eval("clamp(5, 0, 2)") == Value(2));
  CHECK(eval("clamp(-5, 0, 2)") == Value(0));
  CHECK(eval("ind(A)", {Value(7)}) == Value(1));
  CHECK_THROWS_AS(eval("1 / A"), DomainError);
}

TEST_CASE("expression reads unit context") {
  const std::vector<Value> row{Value(3, 4)};
  UnitContext u{5, 1, row};
  CHECK(eval("unit * 2", {}, {}, u) == Value(10));
  CHECK(eval("in(g2)", {}, {}, u) == Value(1));
  CHECK(eval("in(g1)", {}, {}, u) == Value(0));
  CHECK(eval("feat(f) + 1/4", {}, {}, u) == Value(1));
}

TEST_CASE("expression printing round-trips") {
  for (const char* text : {"2 * T + E", "if E <= 8 then 0 else 1", "clamp(1/5 + 3/5 * X, 1/20, 19/20)",
                           "-(A - B) - -3", "A - (B - 1)", "!(A == 1) && (B < 2 || in(g1))",
                           "feat(f) * unit / 2"}) {
    const Expr e = disco::parse_expr(text);
    CHECK(disco::parse_expr(e.to_string()) == e);
  }
}

TEST_CASE("expression parse errors carry positions") {
  try {
    (void)disco::parse_expr("1 + * 2", 4, 10);
    FAIL("expected a parse error");
  } catch (const disco::ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() >= 10);
  }
  CHECK_THROWS_AS(disco::parse_expr("clamp(1, 2"), disco::ParseError);
  ExprScope scope;
  CHECK_THROWS_AS(CompiledExpr(disco::parse_expr("Q + 1"), scope), disco::ValidationError);
}

TEST_CASE("substitute and rename") {
  const Expr e = disco::parse_expr("T + E");
  CHECK(e.substitute("T", Expr::constant(Value(1))) == disco::parse_expr("1 + E"));
  CHECK(e.rename({{"E", "F"}}) == disco::parse_expr("T + F"));
  std::set<std::string> ids;
  e.collect_identifiers(ids);
  CHECK(ids == std::set<std::string>{"E", "T"});
}
