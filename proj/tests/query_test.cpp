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

#include "disco/error.hpp"
#include "disco/query.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace disco;

namespace {

const Model& paper200() {
  static const Model m = *builtin("paper200").model;
  return m;
}

}  // namespace

TEST_CASE("parse a conditioned counterfactual") {
  const Query q = parse_query("P(Y[T=-1]=-1 | T=-1, Y=-1)");
  CHECK(q.kind == Query::Kind::Probability);
  REQUIRE(q.targets.size() == 1);
  CHECK(q.targets[0] == Event::equals("Y", Value(-1), WorldRef::counterfactual({{"T", Value(-1)}})));
  CHECK(q.evidence == std::vector<Event>{Event::equals("T", Value(-1)), Event::equals("Y", Value(-1))});
  CHECK_FALSE(q.restriction);
}

TEST_CASE("empty intervention is its own world") {
  const Query q = parse_query("P(Y[]=-1 | T=-1)");
  REQUIRE(q.targets.size() == 1);
  CHECK_FALSE(q.targets[0].world.is_factual());
  CHECK(q.targets[0].world.intervention().empty());
  CHECK(q.targets[0].world.tag() == "[]");
  CHECK(q.targets[0].world != WorldRef::factual());
}

TEST_CASE("two-world joint with a group restriction") {
  const Query q = parse_query("P(Y[T=1]=1, Y[T=-1]=-1 ; group=Sprime)");
  CHECK(q.targets.size() == 2);
  CHECK(q.counterfactual_worlds().size() == 2);
  CHECK_FALSE(q.references_factual_world());
  REQUIRE(q.restriction);
  CHECK(q.restriction->kind == UnitRestriction::Kind::Group);
  CHECK(q.restriction->group == "Sprime");
  CHECK(validate_query(q, paper200()).ok());
}

TEST_CASE("expectations, sets and unit restriction") {
  const Query e = parse_query("E[Y[T=1] | T in {-1, 1} ; unit=7]");
  CHECK(e.kind == Query::Kind::Expectation);
  CHECK(e.expectation_variable == "Y");
  CHECK(e.expectation_world == WorldRef::counterfactual({{"T", Value(1)}}));
  REQUIRE(e.evidence.size() == 1);
  CHECK(e.evidence[0].values == std::vector<Value>{Value(-1), Value(1)});
  REQUIRE(e.restriction);
  CHECK(e.restriction->unit == 7);
  CHECK(parse_query("P(Y in {1/2, -3} )").targets[0].values ==
        std::vector<Value>{Value(-3), Value(1, 2)});
}

TEST_CASE("evidence in a counterfactual world is rejected") {
  CHECK_THROWS_AS(parse_query("P(Y=1 | Y[T=1]=1)"), ParseError);
}

TEST_CASE("malformed queries report a column") {
  for (const char* text : {"P(Y[T=-1=-1)", "P(Y=)", "Q(Y=1)", "P(Y=1 ; unit=x)", "E[Y=1]", "P(Y=1"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_query(text), ParseError);
  }
  try {
    (void)parse_query("P(Y=1 | T==1)");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() > 8);
  }
}

TEST_CASE("validation against a model") {
  CHECK_FALSE(validate_query(parse_query("P(Z=1)"), paper200()).ok());
  CHECK_FALSE(validate_query(parse_query("P(Y=7)"), paper200()).ok());
  CHECK_FALSE(validate_query(parse_query("P(Y[T=0]=1)"), paper200()).ok());
  CHECK_FALSE(validate_query(parse_query("P(Y=1 ; group=Nope)"), paper200()).ok());
  CHECK_FALSE(validate_query(parse_query("P(Y=1 ; unit=201)"), paper200()).ok());
  CHECK(validate_query(parse_query("P(Y[T=-1]=-1 | T=-1, Y=-1)"), paper200()).ok());
}

TEST_CASE("printing is canonical and round-trips") {
  const Query q = parse_query("P(Y[T=-1]=-1, T=1 | Y=-1, T=-1 ; unit=3)");
  const std::string text = to_string(q);
  CHECK(parse_query(text) == canonical(q));
  CHECK(to_string(parse_query(text)) == text);
  CHECK(to_string(parse_query("P(T=1, Y=0)")) == to_string(parse_query("P(Y=0, T=1)")));

  testing::GenOptions opts;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Model m = testing::random_model(seed, opts);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Query r = testing::random_query(m, seed * 10 + k);
      CHECK(validate_query(r, m).ok());
      CHECK(parse_query(to_string(r)) == canonical(r));
    }
  }
}
