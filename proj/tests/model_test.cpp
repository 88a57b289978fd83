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

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "disco/model.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace disco;

namespace {

const Model& paper200() {
  static const Model m = *builtin("paper200").model;
  return m;
}

bool mentions(const ValidationReport& r, const std::string& needle) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

const char* kCycle = R"(
[units]
count: 1
[var A]
domain: 0 1
[var B]
domain: 0 1
[eq A]
*: B
[eq B]
*: A
)";

}  // namespace

TEST_CASE("paper200 is valid") {
  CHECK(validate_model(paper200()).ok());
  CHECK(topological_order(paper200()) == std::vector<std::string>{"T", "Y"});
}

TEST_CASE("cycle and normalization violations") {
  const Model cyc = parse_model(kCycle);
  const auto report = validate_model(cyc);
  CHECK(mentions(report, "cyclic dependency"));
  CHECK_THROWS_AS(topological_order(cyc), ValidationError);
  CHECK_THROWS_AS(load_model_text(kCycle), ValidationError);

  Model bad = paper200();
  bad.noises[0].pmf = FinitePmf({{Value(-1), Rational(1, 2)}, {Value(1), Rational(2, 5)}});
  CHECK(mentions(validate_model(bad), "pmf not normalized"));
}

TEST_CASE("independent variables keep declaration order") {
  const Model m = load_model_text(R"(
[units]
count: 1
[var B]
domain: 0 1
[var A]
domain: 0 1
[eq B]
*: 0
[eq A]
*: 1
)");
  CHECK(topological_order(m) == std::vector<std::string>{"B", "A"});
}

TEST_CASE("solve follows the group equations") {
  // E is uniform on 1..10 after desugaring; S's threshold is 8, Sprime's 5.
  const auto sprime = solve(paper200(), 150, {{"C", Value(1)}, {"E", Value(6)}});
  CHECK(sprime.at("T") == Value(1));
  CHECK(sprime.at("Y") == Value(2));
  const auto s = solve(paper200(), 1, {{"C", Value(1)}, {"E", Value(3)}});
  CHECK(s.at("T") == Value(-1));
  CHECK(s.at("Y") == Value(-2));

  const Model constant = load_model_text("[units]\ncount: 3\n[noise N]\npmf: 0:1/2 1:1/2\n"
                                         "[var Y]\ndomain: 3\n[eq Y]\n*: 3\n");
  for (UnitId u = 1; u <= 3; ++u)
    for (int n = 0; n < 2; ++n) CHECK(solve(constant, u, {{"N", Value(n)}}).at("Y") == Value(3));

  CHECK_THROWS_AS(solve(paper200(), 1, {{"C", Value(1)}}), ValidationError);
  CHECK_THROWS_AS(solve(paper200(), 1, {{"C", Value(0)}, {"E", Value(1)}}), ValidationError);
  CHECK_THROWS_AS(solve(paper200(), 201, {{"C", Value(1)}, {"E", Value(1)}}), ValidationError);
}

TEST_CASE("apply_do replaces the equation and renames noise") {
  const Intervention iv{{"T", Value(1)}};
  const Model sub = apply_do(paper200(), iv);
  const auto* t = sub.find_equation("T");
  REQUIRE(t);
  REQUIRE(t->bodies.size() == 1);
  CHECK(t->bodies[0].second == Expr::constant(Value(1)));
  CHECK(sub.find_noise("E[T=1]"));
  CHECK_FALSE(sub.find_noise("E"));
  CHECK(sub.find_equation("Y")->bodies[0].second ==
        paper200().find_equation("Y")->bodies[0].second.rename({{"E", "E[T=1]"}}));

  const auto y = solve(sub, 1, {{"C[T=1]", Value(-1)}, {"E[T=1]", Value(9)}});
  CHECK(y.at("Y") == Value(3));

  const Model empty = apply_do(paper200(), {});
  CHECK(empty.find_noise("E[]"));
  CHECK(empty.equations.size() == paper200().equations.size());

  const Model scm = apply_do(paper200().with_coupling(Coupling::Scm), iv);
  CHECK(scm.find_noise("E"));
  CHECK_THROWS_AS(apply_do(paper200(), {{"T", Value(0)}}), ValidationError);
  CHECK_THROWS_AS(apply_do(paper200(), {{"Z", Value(0)}}), ValidationError);
}

TEST_CASE("format_model round-trips") {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin(name);
    if (!s.model) continue;
    CAPTURE(name);
    CHECK(parse_model(format_model(*s.model)) == *s.model);
  }
  testing::GenOptions opts;
  opts.feature = true;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Model m = testing::random_model(seed, opts);
    CHECK(parse_model(format_model(m)) == m);
  }
}

TEST_CASE("parse errors report line numbers") {
  try {
    (void)parse_model("[units]\ncount: 2\n\n[noise E]\npmf: 0:1/2 1:\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  try {
    (void)parse_model("[units]\ncount: 2\n[bogus]\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("save and load keep the model") {
  const auto path = std::filesystem::temp_directory_path() / "disco_model_test.dscm";
  save_model(paper200(), path);
  CHECK(load_model(path) == paper200());
  std::filesystem::remove(path);
}

TEST_CASE("population defaults and weights") {
  const Model& m = paper200();
  CHECK(m.population.count() == 200);
  CHECK(m.population.weight(7) == Rational(1, 200));
  CHECK(m.population.group_name_of(100) == "S");
  CHECK(m.population.group_name_of(101) == "Sprime");
  CHECK(m.population.units_in("S").size() == 100);

  const Model w = load_model_text("[units]\ncount: 2\nweight 1: 1/4\nweight 2: 3/4\n"
                                  "[var Y]\ndomain: 0\n[eq Y]\n*: 0\n");
  CHECK(w.population.weight(2) == Rational(3, 4));
  CHECK_THROWS_AS(load_model_text("[units]\ncount: 2\nweight 1: 1/4\nweight 2: 1/4\n"
                                  "[var Y]\ndomain: 0\n[eq Y]\n*: 0\n"),
                  ValidationError);
}

TEST_CASE("bodies leaving their domain") {
  const char* text = "[units]\ncount: 1\n[noise N]\npmf: 0:1/2 1:1/2\n"
                     "[var Y]\ndomain: 0 1\n[eq Y]\n*: 2 * N\n";
  CHECK_THROWS_AS(load_model_text(text), ValidationError);
  const Model m = parse_model(text);
  CHECK_FALSE(validate_model(m).ok());
}
