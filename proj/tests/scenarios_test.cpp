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
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "disco/exact.hpp"
#include "disco/sampling.hpp"
#include "disco/scenarios.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace disco;

TEST_CASE("builtin catalogue") {
  const auto names = builtin_names();
  for (const char* want : {"paper200", "paper200-sprime", "incentive", "surrogate", "exam-luck",
                           "linear-gaussian"})
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  CHECK_THROWS_AS(builtin("no-such-scenario"), ValidationError);
}

TEST_CASE("every expected exact value holds") {
  for (const auto& name : builtin_names()) {
    const Scenario s = builtin(name);
    CAPTURE(name);
    CHECK_FALSE(s.description.empty());
    if (!s.model) continue;
    std::map<Coupling, std::unique_ptr<ExactEngine>> engines;
    for (const auto& e : s.expected) {
      CAPTURE(e.query);
      REQUIRE(e.value);
      auto& engine = engines[e.mode];
      if (!engine) engine = std::make_unique<ExactEngine>(s.model->with_coupling(e.mode));
      const Query q = parse_query(e.query);
      CHECK(engine->population(q) == *e.value);
    }
  }
}

TEST_CASE("small scenarios agree with enumeration") {
  for (const char* name : {"surrogate", "exam-luck", "paper200-sprime"}) {
    const Scenario s = builtin(name);
    CAPTURE(name);
    for (const auto& e : s.expected)
      CHECK(testing::oracle_population(s.model->with_coupling(e.mode), parse_query(e.query)) == *e.value);
  }
}

TEST_CASE("continuous scenario is sampling only") {
  const Scenario s = builtin("linear-gaussian");
  CHECK_FALSE(s.model);
  REQUIRE(s.continuous);
  for (const auto& e : s.expected) {
    REQUIRE(e.approx);
    const Estimate est = mc_linear_gaussian(*s.continuous, parse_query(e.query), 100000, 17);
    CAPTURE(e.query);
    CHECK(std::abs(est.point - *e.approx) <= 4 * est.std_error);
  }
  CHECK_THROWS(load_model_or_builtin("linear-gaussian"));
}

TEST_CASE("paper200 ships its observational table") {
  const Scenario s = builtin("paper200");
  REQUIRE(s.dataset);
  CHECK(s.dataset->records.size() == 200);
  CHECK(population_valuation(*s.model, parse_query("P(Y[T=-1]=-1)")) == Rational(7, 20));
}

TEST_CASE("save then load keeps valuations") {
  const Model m = *builtin("paper200").model;
  const auto path = std::filesystem::temp_directory_path() / "disco_scenario_test.dscm";
  save_model(m, path);
  const Model back = load_model_or_builtin(path.string());
  for (const char* q : {"P(Y[T=-1]=-1)", "P(Y[]=-1 | T=-1)", "P(Y[T=-1]=-1 | T=-1, Y=-1)"})
    CHECK(population_valuation(back, parse_query(q)) == population_valuation(m, parse_query(q)));
  std::filesystem::remove(path);
}

TEST_CASE("model files with errors") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto bad_pmf = dir / "disco_bad_pmf.dscm";
  std::ofstream(bad_pmf) << "[units]\ncount: 1\n\n[noise E]\npmf: 0:1/2 1\n";
  try {
    (void)load_model_or_builtin(bad_pmf.string());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  const auto cyc = dir / "disco_cycle.dscm";
  std::ofstream(cyc) << "[units]\ncount: 1\n[var A]\ndomain: 0 1\n[var B]\ndomain: 0 1\n"
                        "[eq A]\n*: B\n[eq B]\n*: A\n";
  CHECK_THROWS_AS(load_model_or_builtin(cyc.string()), ValidationError);
  std::filesystem::remove(bad_pmf);
  std::filesystem::remove(cyc);
}

TEST_CASE("scenario directory override") {
  const auto dir = std::filesystem::temp_directory_path() / "disco_scenarios_override";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "paper200.dscm") << "[units]\ncount: 1\n[var Y]\ndomain: 0 1\n[eq Y]\n*: 1\n";
  std::ofstream(dir / "paper200.json") << R"({"description": "stub", "expected": []})";
  ::setenv("DISCO_SCENARIO_DIR", dir.c_str(), 1);
  const Scenario s = builtin("paper200");
  ::unsetenv("DISCO_SCENARIO_DIR");
  CHECK(s.description == "stub");
  CHECK(s.model->population.count() == 1);
  CHECK(builtin("paper200").model->population.count() == 200);
  std::filesystem::remove_all(dir);
}
