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
#include "disco/exact.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracle.hpp"

using namespace disco;

namespace {

const Model& paper200() {
  static const Model m = *builtin("paper200").model;
  return m;
}

Rational pop(const Model& m, const std::string& q) { return population_valuation(m, parse_query(q)); }

Event ev(const std::string& var, int v) { return Event::equals(var, Value(v)); }

}  // namespace

TEST_CASE("layer-1 and layer-2 unit values") {
  ExactEngine engine(paper200());
  CHECK(engine.layer1(1, ev("Y", -1), {ev("T", -1)}) == Rational(1, 5));
  CHECK(engine.layer1(150, ev("Y", -1), {ev("T", -1)}) == Rational(1, 2));
  CHECK(engine.layer2(1, {{"T", Value(-1)}}, ev("Y", -1)) == Rational(1, 5));
  CHECK(engine.layer2(150, {{"T", Value(-1)}}, ev("Y", -1)) == Rational(1, 2));
  CHECK_THROWS_AS(engine.layer1(1, ev("Y", -1), {ev("T", 1)}), NullEventError);
  try {
    (void)engine.layer1(1, ev("Y", -1), {ev("T", 1)});
  } catch (const NullEventError& e) {
    CHECK(std::string(e.what()) == "conditioning on null event");
  }
}

TEST_CASE("individual counterfactual given evidence") {
  const Query q = parse_query("P(Y[T=-1]=-1 | T=-1, Y=-2)");
  CHECK(layer3_individual(paper200(), 1, q) == Rational(1, 5));
  CHECK(layer3_individual(paper200().with_coupling(Coupling::Scm), 1, q) == 0);
}

TEST_CASE("abduction masses") {
  const auto total_s = [](const UnitPosterior& p) {
    Rational s = 0;
    for (UnitId u = 1; u <= 100; ++u) s += p[u];
    return s;
  };
  CHECK(total_s(abduce(paper200(), {ev("T", -1)})) == Rational(2, 3));
  CHECK(total_s(abduce(paper200(), {ev("T", -1), ev("Y", -1)})) == Rational(4, 9));
  const UnitPosterior prior = abduce(paper200(), {});
  for (UnitId u : {1, 100, 101, 200}) CHECK(prior[u] == Rational(1, 200));
  CHECK_THROWS_AS(abduce(paper200(), {ev("Y", 3), ev("T", -1)}), NullEventError);
}

TEST_CASE("population valuations on paper200") {
  CHECK(pop(paper200(), "P(Y[T=-1]=-1)") == Rational(7, 20));
  CHECK(pop(paper200(), "P(Y[]=-1 | T=-1)") == Rational(13, 60));
  CHECK(pop(paper200(), "P(Y[T=-1]=-1 | T=-1, Y=-1)") == Rational(11, 30));
  const Model scm = paper200().with_coupling(Coupling::Scm);
  for (const Model* m : {&paper200(), &scm}) CHECK(pop(*m, "P(Y=-1 | T=-1)") == Rational(3, 10));
  CHECK(pop(scm, "P(Y[T=-1]=-1 | T=-1, Y=-1)") == 1);
  CHECK(pop(paper200(), "E[Y[T=1] ; group=S]") == Rational(11, 5));
}

TEST_CASE("probability of consistency") {
  const Model incentive = *builtin("incentive").model;
  ExactEngine disco(incentive);
  ExactEngine scm(incentive.with_coupling(Coupling::Scm));
  CHECK(probability_of_consistency(disco, 1, "S", Value(0), "T", Value(1)) == Rational(1, 2));
  CHECK(probability_of_consistency(disco, 11, "S", Value(1), "T", Value(0)) == 1);
  for (UnitId u = 1; u <= 30; ++u) {
    const Value s = Value(static_cast<std::int64_t>((u - 1) / 10));
    for (int t = 0; t < 2; ++t) {
      try {
        (void)probability_of_consistency(disco, u, "S", s, "T", Value(t));
      } catch (const NullEventError&) {
        CHECK(s == Value(1));  // pure arm: one treatment value never occurs
        continue;
      }
      CHECK(probability_of_consistency(scm, u, "S", s, "T", Value(t)) == 1);
    }
  }
  CHECK_THROWS_AS(probability_of_consistency(disco, 11, "S", Value(1), "T", Value(1)), NullEventError);
}

TEST_CASE("ite and cate") {
  ExactEngine engine(paper200());
  for (UnitId u : {1, 57, 100}) CHECK(ite(engine, u, "T", Value(1), Value(-1), "Y") == 4);
  for (UnitId u : {101, 200}) CHECK(ite(engine, u, "T", Value(1), Value(-1), "Y") == 2);

  const auto in_s = select_units(paper200(), parse_expr("in(S)"));
  CHECK(in_s.size() == 100);
  CHECK(cate(engine, in_s, "T", Value(1), Value(-1), "Y") == 4);
  CHECK(cate(engine, {150}, "T", Value(1), Value(-1), "Y") ==
        ite(engine, 150, "T", Value(1), Value(-1), "Y"));
  CHECK_THROWS_AS(cate(engine, {}, "T", Value(1), Value(-1), "Y"), DomainError);

  const Model flat = load_model_text("[units]\ncount: 2\n[noise N]\npmf: 0:1/3 1:2/3\n"
                                     "[noise M]\npmf: 0:1/2 1:1/2\n"
                                     "[var T]\ndomain: 0 1\n[var Y]\ndomain: 0 1\n"
                                     "[eq T]\n*: N\n[eq Y]\n*: 1 - M\n");
  ExactEngine fe(flat);
  CHECK(ite(fe, 1, "T", Value(1), Value(0), "Y") == 0);
}

TEST_CASE("cate on the incentive scenario matches enumeration") {
  const Model m = *builtin("incentive").model;
  ExactEngine engine(m);
  std::vector<UnitId> all;
  for (UnitId u = 1; u <= 30; ++u) all.push_back(u);
  const Rational expected = testing::oracle_population(m, parse_query("E[Y[T=1]]")) -
                            testing::oracle_population(m, parse_query("E[Y[T=0]]"));
  CHECK(cate(engine, all, "T", Value(1), Value(0), "Y") == expected);

  const auto high = select_units(m, parse_expr("feat(x) >= 1/2"));
  CHECK(high.size() == 18);
  Rational sum = 0;
  for (UnitId u : high) {
    sum += testing::oracle_individual(m, u, parse_query("E[Y[T=1]]")) -
           testing::oracle_individual(m, u, parse_query("E[Y[T=0]]"));
  }
  CHECK(cate(engine, high, "T", Value(1), Value(0), "Y") == sum / 18);
}

TEST_CASE("complier probability is a two-world joint") {
  const Model m = *builtin("incentive").model;
  ExactEngine engine(m);
  for (UnitId u : {1, 5, 22}) {
    const Rational expected = testing::oracle_individual(m, u, parse_query("P(Y[T=0]=0, Y[T=1]=1)"));
    CHECK(complier_probability(engine, u, "T", Value(0), Value(1), "Y", Value(0), Value(1)) == expected);
  }
}

TEST_CASE("engine agrees with the twin-network oracle on random models") {
  for (const bool scm : {false, true}) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      testing::GenOptions opts;
      opts.feature = seed % 3 == 0;
      opts.random_feature = seed % 6 == 0;
      opts.root_treatment = seed % 2 == 0;
      Model m = testing::random_model(seed, opts);
      if (scm) m = m.with_coupling(Coupling::Scm);
      ExactEngine engine(m);
      for (std::uint64_t k = 0; k < 6; ++k) {
        Query q = testing::random_query(m, seed * 31 + k);
        CAPTURE(seed);
        CAPTURE(to_string(q));
        CAPTURE(scm);
        std::optional<Rational> want;
        try {
          want = testing::oracle_population(m, q);
        } catch (const NullEventError&) {
        }
        if (want) {
          CHECK(engine.population(q) == *want);
          const UnitId u = 1 + static_cast<UnitId>(k) % m.population.count();
          try {
            const Rational ind = testing::oracle_individual(m, u, q);
            CHECK(engine.individual(u, q) == ind);
          } catch (const NullEventError&) {
            CHECK_THROWS_AS(engine.individual(u, q), NullEventError);
          }
        } else {
          CHECK_THROWS_AS(engine.population(q), NullEventError);
        }
      }
    }
  }
}

TEST_CASE("result json") {
  const Query q = parse_query("P(Y[]=-1 | T=-1)");
  const auto j = nlohmann::json::parse(result_json(q, Coupling::Disco, Rational(13, 60)));
  CHECK(j["query"] == "P(Y[]=-1 | T=-1)");
  CHECK(j["mode"] == "disco");
  CHECK(j["value"]["num"] == "13");
  CHECK(j["value"]["den"] == "60");
  CHECK(j["decimal"] == "0.21667");
}
