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

#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "disco/verify.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace disco;

namespace {

const Model& paper200() {
  static const Model m = *builtin("paper200").model;
  return m;
}

// Every noise replaced by a point mass at its modal value.
Model collapse(Model m) {
  for (auto& n : m.noises) n.pmf = FinitePmf::point(n.pmf.mode());
  return m;
}

class WrongLayer1 : public ExactEngine {
 public:
  using ExactEngine::ExactEngine;
  Rational layer1(UnitId unit, const Event& outcome, const std::vector<Event>& condition) override {
    Rational r = ExactEngine::layer1(unit, outcome, condition);
    if (coupling() == Coupling::Scm && r != 0) r = r * Rational(9, 10);
    return r;
  }
};

class WrongJoint : public ExactEngine {
 public:
  using ExactEngine::ExactEngine;
  Rational individual(UnitId unit, const Query& q) override {
    Rational r = ExactEngine::individual(unit, q);
    if (coupling() == Coupling::Scm && q.targets.size() == 2) r = 1 - r;
    return r;
  }
};

}  // namespace

TEST_CASE("layer-1/2 equivalence on paper200") {
  const CheckReport r = verify_layer12_equivalence(paper200());
  CHECK(r.passed());
  CHECK(r.checked > 0);
}

TEST_CASE("layer-1/2 equivalence on random three-variable models") {
  testing::GenOptions opts;
  opts.max_vars = 3;
  opts.root_treatment = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    CHECK(verify_layer12_equivalence(testing::random_model(seed + 1000, opts)).passed());
  }
}

TEST_CASE("corrupted evaluators are caught") {
  const CheckReport l12 = verify_layer12_equivalence(
      paper200(), [](const Model& m) { return std::make_unique<WrongLayer1>(m); });
  CHECK_FALSE(l12.passed());
  CHECK(l12.summary().find("failures") != std::string::npos);

  const CheckReport l3 = verify_degenerate_l3_equivalence(
      collapse(paper200()), [](const Model& m) { return std::make_unique<WrongJoint>(m); });
  CHECK_FALSE(l3.passed());
}

TEST_CASE("degenerate noise makes the couplings agree") {
  CHECK(verify_degenerate_l3_equivalence(collapse(paper200())).passed());
  testing::GenOptions opts;
  opts.point_mass = true;
  opts.positivity = false;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    CAPTURE(seed);
    CHECK(verify_degenerate_l3_equivalence(testing::random_model(seed, opts)).passed());
  }
  try {
    (void)verify_degenerate_l3_equivalence(paper200());
    FAIL("expected a precondition error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("not a point mass") != std::string::npos);
  }
}

TEST_CASE("mixture identity") {
  CHECK(verify_mixture_lemma(paper200(), "T", "Y").passed());
  CHECK(verify_mixture_lemma(paper200().with_coupling(Coupling::Scm), "T", "Y").passed());

  // Unit 1 is in S, where T is fixed: the mixture has a single arm and the
  // identity is distribution-consistency. Checked here by enumeration.
  for (int y = -2; y <= 3; ++y) {
    const Rational obs = testing::oracle_individual(paper200(), 1, parse_query("P(Y=" + std::to_string(y) + ")"));
    const Rational cf =
        testing::oracle_individual(paper200(), 1, parse_query("P(Y[T=-1]=" + std::to_string(y) + ")"));
    CHECK(obs == cf);
  }
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    CHECK(verify_mixture_lemma(testing::random_model(seed, {}), "T", "Y").passed());
  }
  CHECK_THROWS_AS(verify_mixture_lemma(paper200(), "Y", "T"), DomainError);
}

TEST_CASE("random ancestor of the treatment is a precondition error") {
  const Model m = load_model_text(R"(
[units]
count: 1
[noise Z]
pmf: 0:1/2 1:1/2
[var W]
domain: 0 1
[var T]
domain: 0 1
[var Y]
domain: 0 1 2
[eq W]
*: Z
[eq T]
*: W
[eq Y]
*: T + W
)");
  CHECK_THROWS_AS(verify_mixture_lemma(m, "T", "Y"), DomainError);
  CHECK_THROWS_AS(verify_consistency_equivalence(m, "T", "Y"), DomainError);
}

TEST_CASE("consistency equivalence") {
  CHECK(verify_consistency_equivalence(paper200(), "T", "Y").passed());
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    CAPTURE(seed);
    CHECK(verify_consistency_equivalence(testing::random_model(seed + 77, {}), "T", "Y").passed());
  }
}

TEST_CASE("propensity stratum independence") {
  const CheckReport r = check_propensity_independence(paper200(), "T", "Y", Value(1));
  CHECK(r.passed());
  CHECK(r.checked > 0);
  // Without the stratum the treatment probability moves with the outcome.
  const Rational treated = 1 - population_valuation(paper200(), parse_query("P(T=-1)"));
  CHECK(treated == Rational(1, 4));
  const Rational given_y2 = testing::oracle_population(
      paper200(), Query::probability({Event::equals("T", Value(1))},
                                     {Event::equals("Y", Value(2))}));
  CHECK(given_y2 != treated);
  CHECK_FALSE(r.notes.empty());

  const Model single = load_model_text("[units]\ncount: 1\n[noise N]\npmf: 0:1/3 1:2/3\n"
                                       "[noise M]\npmf: 0:1/2 1:1/2\n"
                                       "[var T]\ndomain: 0 1\n[var Y]\ndomain: 0 1 2\n"
                                       "[eq T]\n*: N\n[eq Y]\n*: T + M\n");
  CHECK(check_propensity_independence(single, "T", "Y", Value(1)).passed());
  CHECK(check_propensity_independence(single, "T", "Y", Value(0)).passed());
}

TEST_CASE("unit determinism helper") {
  ExactEngine engine(paper200());
  CHECK_FALSE(is_unit_deterministic(engine, "T"));
  ExactEngine collapsed(collapse(paper200()));
  CHECK(is_unit_deterministic(collapsed, "Y"));
}
