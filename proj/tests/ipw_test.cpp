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

#include <cmath>

#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "disco/ipw.hpp"
#include "disco/sampling.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace disco;

namespace {

const Model& paper200() {
  static const Model m = *builtin("paper200").model;
  return m;
}

// X comes from its own noise and feeds neither T nor Y; T depends on the
// unit; Y reads T and the unit.
const char* kPrivateFeature = R"(
[units]
count: 3
group a: 1..1
group b: 2..3
[noise NX]
pmf: 0:1/3 1:2/3
[noise NT]
uniform: 1..4
[noise NY]
pmf: 0:1/2 1:1/4 2:1/4
[var X]
domain: 0 1
[var T]
domain: 0 1
[var Y]
domain: 0..4
[eq X]
*: NX
[eq T]
a: NT <= 1
*: NT <= unit
[eq Y]
*: clamp(NY + T * (1 + (unit == 2)) + (unit == 3), 0, 4)
)";

// Σ_u P(u) E[Y | T=t; u], each term by enumeration.
Rational weighted_conditional_mean(const Model& m, Value t) {
  Rational sum = 0;
  for (UnitId u = 1; u <= m.population.count(); ++u)
    sum += m.population.weight(u) *
           testing::oracle_individual(m, u, Query::expectation("Y", WorldRef::factual(),
                                                               {Event::equals("T", t)}));
  return sum;
}

}  // namespace

TEST_CASE("ipw identity needs positivity") {
  try {
    (void)ipw_ate_check(paper200(), "T", "Y", Value(1));
    FAIL("expected a positivity error");
  } catch (const PositivityError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("group S") != std::string::npos);
    CHECK(msg.find("1..100") != std::string::npos);
  }
}

TEST_CASE("ipw identity on the coin-flip subpopulation") {
  const Model sprime = *builtin("paper200-sprime").model;
  const IdentityReport r = ipw_ate_check(sprime, "T", "Y", Value(1));
  CHECK(r.holds());
  CHECK(r.lhs == Rational(3, 2));
  CHECK(r.rhs == weighted_conditional_mean(sprime, Value(1)));
  const IdentityReport low = ipw_ate_check(sprime, "T", "Y", Value(-1));
  CHECK(low.holds());
  CHECK(low.lhs == Rational(-1, 2));
}

TEST_CASE("ipw identity on random models") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    const Model m = testing::random_model(seed + 300, {});
    for (int t = 0; t < 2; ++t) {
      const IdentityReport r = ipw_ate_check(m, "T", "Y", Value(t));
      CHECK(r.holds());
      CHECK(r.lhs == testing::oracle_population(m, parse_query("E[Y[T=" + std::to_string(t) + "]]")));
      CHECK(r.rhs == weighted_conditional_mean(m, Value(t)));
    }
  }
}

TEST_CASE("ipw estimate on sampled data") {
  const Model sprime = *builtin("paper200-sprime").model;
  ExactEngine engine(sprime);
  const auto e = propensities(engine, "T", Value(1));
  CHECK(e.at(1) == Rational(1, 2));
  const Dataset d = sample_dataset(sprime, 100000, 31);
  const Estimate est = ipw_ate_estimate(d, e, "T", "Y", Value(1));
  CHECK(std::abs(est.point - 1.5) <= 4 * est.std_error);
}

TEST_CASE("conditional ipw with a private-noise feature") {
  const Model m = load_model_text(kPrivateFeature);
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x) {
      const IdentityReport r = ipw_conditional_check(m, "T", "X", "Y", Value(t), Value(x));
      CAPTURE(r.summary());
      CHECK(r.holds());
      const std::string q = "E[Y[T=" + std::to_string(t) + "] | X=" + std::to_string(x) + "]";
      CHECK(r.lhs == testing::oracle_population(m, parse_query(q)));
    }
}

TEST_CASE("structural precondition of the feature") {
  const Model m = load_model_text(R"(
[units]
count: 2
[noise NT]
pmf: 0:1/2 1:1/2
[var T]
domain: 0 1
[var X]
domain: 0 1
[var Y]
domain: 0 1 2
[eq T]
*: NT
[eq X]
*: T
[eq Y]
*: T + X
)");
  CHECK_THROWS_AS(ipw_conditional_check(m, "T", "X", "Y", Value(1), Value(1)), DomainError);
  CHECK_THROWS_AS(ipw_posttreatment_check(m, "T", "X", "Y", Value(1), Value(1), Value(2)), DomainError);
}

TEST_CASE("random feature feeding the outcome is rejected") {
  const Model m = load_model_text(std::string(kPrivateFeature).replace(
      std::string(kPrivateFeature).find("(unit == 3)"), 11, "X"));
  CHECK_THROWS_AS(ipw_conditional_check(m, "T", "X", "Y", Value(1), Value(1)), DomainError);
}

TEST_CASE("zero-mass feature value") {
  const Model m = load_model_text(std::string(kPrivateFeature).replace(
      std::string(kPrivateFeature).find("*: NX"), 5, "*: 0"));
  CHECK_THROWS_AS(ipw_conditional_check(m, "T", "X", "Y", Value(1), Value(1)), NullEventError);
}

TEST_CASE("post-treatment ipw") {
  const Model m = load_model_text(kPrivateFeature);
  ExactEngine engine(m);
  int checked = 0;
  for (int x = 0; x < 2; ++x)
    for (int t = 0; t < 2; ++t)
      for (int y = 0; y <= 4; ++y) {
        const Query ev = Query::probability(
            {Event::equals("Y", Value(y))}, {Event::equals("X", Value(x)), Event::equals("T", Value(t))});
        bool possible = true;
        try {
          possible = testing::oracle_population(m, ev) >= 0;
        } catch (const NullEventError&) {
          possible = false;
        }
        if (possible && testing::oracle_population(m, ev) == 0) possible = false;
        if (!possible) {
          CHECK_THROWS_AS(ipw_posttreatment_check(m, "T", "X", "Y", Value(x), Value(t), Value(y)),
                          NullEventError);
          continue;
        }
        const IdentityReport r = ipw_posttreatment_check(m, "T", "X", "Y", Value(x), Value(t), Value(y));
        CAPTURE(r.summary());
        CHECK(r.holds());
        const std::string q = "E[Y[T=" + std::to_string(t) + "] | X=" + std::to_string(x) +
                              ", T=" + std::to_string(t) + ", Y=" + std::to_string(y) + "]";
        CHECK(r.lhs == testing::oracle_population(m, parse_query(q)));
        ++checked;
      }
  CHECK(checked > 4);
  CHECK_THROWS_AS(ipw_posttreatment_check(m.with_coupling(Coupling::Scm), "T", "X", "Y", Value(1),
                                          Value(1), Value(1)),
                  DomainError);
}
