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

#include "disco/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "disco/dscm.hpp"
#include "disco/error.hpp"
#include "disco/exact.hpp"
#include "disco/ipw.hpp"
#include "disco/optimizer.hpp"
#include "disco/sampling.hpp"
#include "disco/scenarios.hpp"
#include "disco/verify.hpp"
#include "json.hpp"

namespace disco {
namespace {

struct Source {
  std::string scenario;
  std::string model_path;
  std::string mode = "disco";

  void add(CLI::App* cmd) {
    auto* s = cmd->add_option("--scenario", scenario, "Builtin scenario name");
    auto* m = cmd->add_option("--model", model_path, "Path to a .dscm model");
    s->excludes(m);
    cmd->add_option("--mode", mode, "Coupling: disco or scm")
        ->check(CLI::IsMember({"disco", "scm"}));
  }

  Scenario load() const {
    Scenario s;
    if (!model_path.empty()) {
      s.name = model_path;
      s.model = load_model(model_path);
    } else if (!scenario.empty()) {
      s = builtin(scenario);
    } else {
      throw ValidationError("one of --scenario or --model is required");
    }
    if (s.model) s.model->coupling = parse_coupling(mode);
    return s;
  }

  Model finite() const {
    Scenario s = load();
    if (!s.model) throw DomainError("scenario " + s.name + " has no finite model");
    return *s.model;
  }
};

std::string fixed(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string render_estimate(const Estimate& e) {
  return fixed(e.point) + " +/- " + fixed(e.std_error) + " (n=" + std::to_string(e.n) +
         ", seed=" + std::to_string(e.seed) + ")";
}

nlohmann::ordered_json estimate_json(const Estimate& e) {
  nlohmann::ordered_json j;
  j["point"] = e.point;
  j["stderr"] = e.std_error;
  j["n"] = e.n;
  j["draws"] = e.draws;
  j["seed"] = e.seed;
  return j;
}

Value parse_value_flag(const std::string& text, const char* flag) {
  Value v;
  if (!Value::try_parse(text, v)) throw ValidationError(std::string("bad value for ") + flag + ": " + text);
  return v;
}

Value default_treated(const Model& model, const std::string& treatment) {
  const VariableDecl* decl = model.find_variable(treatment);
  if (!decl) throw ValidationError("undeclared variable " + treatment);
  return *std::max_element(decl->domain.begin(), decl->domain.end());
}

std::unique_ptr<std::ostream> open_out(const std::string& path) {
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*f) throw Error("cannot write " + path);
  return f;
}

// A deliberately wrong engine, used to exercise the failure path.
class FaultyEngine : public ExactEngine {
 public:
  using ExactEngine::ExactEngine;
  Rational layer2(UnitId unit, const Intervention& iv, const Event& outcome) override {
    Rational r = ExactEngine::layer2(unit, iv, outcome);
    if (coupling() == Coupling::Scm) r = r / 2;
    return r;
  }
  Rational individual(UnitId unit, const Query& q) override {
    Rational r = ExactEngine::individual(unit, q);
    if (coupling() == Coupling::Scm && q.evidence.empty()) r = r / 2;
    return r;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual inference with disco and scm coupling"};
  app.name("disco");
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  std::string format = "table";
  app.add_option("--format", format, "Output format: table or json")
      ->check(CLI::IsMember({"table", "json"}));
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads for sampling (0: all cores)");
  bool inject_fault = false;
  app.add_flag("--inject-fault", inject_fault)->group("");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate a probability or expectation query");
  Source eval_src;
  eval_src.add(eval);
  std::string query_text, engine = "exact";
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  eval->add_option("--query,-q", query_text, "Query text")->required();
  eval->add_option("--engine", engine, "exact or mc")->check(CLI::IsMember({"exact", "mc"}));
  eval->add_option("-n,--samples", samples, "Monte-Carlo draws");
  eval->add_option("--seed", seed, "Monte-Carlo seed");

  // verify
  auto* verify = app.add_subcommand("verify", "Check causal identities exactly");
  Source verify_src;
  verify_src.add(verify);
  std::string suite, treatment = "T", outcome = "Y", feature = "X";
  std::string t_text, x_text, y_text;
  bool collapse = false;
  verify->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember({"layer12", "degenerate-l3", "mixture", "consistency", "propensity",
                             "ipw", "ipw-cond", "ipw-post"}));
  verify->add_option("--treatment", treatment, "Treatment variable");
  verify->add_option("--outcome", outcome, "Outcome variable");
  verify->add_option("--feature", feature, "Feature variable");
  verify->add_option("--t", t_text, "Treatment value");
  verify->add_option("--x", x_text, "Feature value");
  verify->add_option("--y", y_text, "Outcome value");
  verify->add_flag("--collapse-noise", collapse, "Replace every noise by its modal value first");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Sample an observational dataset");
  Source sim_src;
  sim_src.add(simulate);
  std::int64_t sim_n = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  bool table = false;
  simulate->add_option("-n,--samples", sim_n, "Number of records");
  simulate->add_option("--seed", sim_seed, "Seed");
  simulate->add_option("--out,-o", sim_out, "Output CSV (sidecar JSON next to it)");
  simulate->add_flag("--table", table, "Write the scenario's exact table instead of sampling");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "IPW estimate of E[Y[T=t]] from a dataset");
  Source est_src;
  est_src.add(estimate);
  std::string data_path, est_t;
  std::string est_treatment = "T", est_outcome = "Y";
  estimate->add_option("--data", data_path, "Dataset CSV")->required();
  estimate->add_option("--t", est_t, "Treatment value")->required();
  estimate->add_option("--treatment", est_treatment, "Treatment variable");
  estimate->add_option("--outcome", est_outcome, "Outcome variable");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Budgeted treatment allocation");
  Source opt_src;
  opt_src.add(optimize);
  std::string budget_text, costs_path, policy_out, algorithm = "greedy", tau_source = "exact";
  std::string score = "uplift", opt_data, opt_treatment = "T", opt_outcome = "Y";
  optimize->add_option("--budget", budget_text, "Budget")->required();
  optimize->add_option("--costs", costs_path, "Costs CSV unit,treatment,cost");
  optimize->add_option("--algorithm", algorithm, "greedy or exact")
      ->check(CLI::IsMember({"greedy", "exact"}));
  optimize->add_option("--tau", tau_source, "exact or empirical")
      ->check(CLI::IsMember({"exact", "empirical"}));
  optimize->add_option("--score", score, "uplift or complier")
      ->check(CLI::IsMember({"uplift", "complier"}));
  optimize->add_option("--data", opt_data, "Dataset for --tau empirical");
  optimize->add_option("--treatment", opt_treatment, "Treatment variable");
  optimize->add_option("--outcome", opt_outcome, "Outcome variable");
  optimize->add_option("--out,-o", policy_out, "Policy CSV path");

  // scenarios
  auto* scenarios = app.add_subcommand("scenarios", "List or show builtin scenarios");
  scenarios->require_subcommand(1);
  auto* list = scenarios->add_subcommand("list", "List builtin scenarios");
  auto* show = scenarios->add_subcommand("show", "Print a scenario's model and expected values");
  std::string show_name;
  show->add_option("name", show_name, "Scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const bool json = format == "json";
  SamplingOptions sampling;
  sampling.threads = threads;

  try {
    if (eval->parsed()) {
      const Query query = parse_query(query_text);
      const Scenario s = eval_src.load();
      if (engine == "mc") {
        if (!samples || !seed) throw ValidationError("--engine mc requires -n and --seed");
        Estimate e;
        if (s.model) {
          if (auto r = validate_query(query, *s.model); !r.ok()) throw ValidationError(r.summary());
          e = mc_valuation(*s.model, query, *samples, *seed, sampling);
        } else {
          e = mc_linear_gaussian(*s.continuous, query, *samples, *seed, sampling);
        }
        if (json) {
          nlohmann::ordered_json j;
          j["query"] = to_string(query);
          j["mode"] = eval_src.mode;
          j["engine"] = "mc";
          j.update(estimate_json(e));
          out << j.dump() << '\n';
        } else {
          out << render_estimate(e) << '\n';
        }
        return kExitOk;
      }
      if (!s.model) throw DomainError("scenario " + s.name + " supports only --engine mc");
      if (auto r = validate_query(query, *s.model); !r.ok()) throw ValidationError(r.summary());
      ExactEngine ex(*s.model);
      const Rational value = ex.population(query);
      if (query.kind == Query::Kind::Probability && (value < 0 || value > 1))
        throw InternalError("probability outside [0, 1]: " + fraction_string(value));
      if (json)
        out << result_json(query, s.model->coupling, value) << '\n';
      else
        out << fraction_string(value) << " (" << decimal_string(value) << ")\n";
      return kExitOk;
    }

    if (verify->parsed()) {
      Model model = verify_src.finite();
      if (collapse)
        for (auto& n : model.noises) n.pmf = FinitePmf::point(n.pmf.mode());
      const Value t = t_text.empty() ? default_treated(model, treatment)
                                     : parse_value_flag(t_text, "--t");
      std::optional<CheckReport> check;
      std::optional<IdentityReport> identity;
      EngineFactory factory;
      if (inject_fault) factory = [](const Model& m) { return std::make_unique<FaultyEngine>(m); };
      if (suite == "layer12") {
        check = verify_layer12_equivalence(model, factory);
      } else if (suite == "degenerate-l3") {
        check = verify_degenerate_l3_equivalence(model, factory);
      } else if (suite == "mixture") {
        check = verify_mixture_lemma(model, treatment, outcome);
      } else if (suite == "consistency") {
        check = verify_consistency_equivalence(model, treatment, outcome);
      } else if (suite == "propensity") {
        check = check_propensity_independence(model, treatment, outcome, t);
      } else if (suite == "ipw") {
        identity = ipw_ate_check(model, treatment, outcome, t);
      } else {
        if (x_text.empty()) throw ValidationError("--x is required for " + suite);
        const Value x = parse_value_flag(x_text, "--x");
        if (suite == "ipw-cond") {
          identity = ipw_conditional_check(model, treatment, feature, outcome, t, x);
        } else {
          if (y_text.empty()) throw ValidationError("--y is required for ipw-post");
          identity = ipw_posttreatment_check(model, treatment, feature, outcome, x, t,
                                             parse_value_flag(y_text, "--y"));
        }
      }
      if (inject_fault && identity) identity->rhs += Rational(1, 1000);
      const bool passed = check ? check->passed() : identity->holds();
      if (json) {
        nlohmann::ordered_json j;
        j["suite"] = suite;
        j["passed"] = passed;
        if (check) {
          j["checked"] = check->checked;
          j["failures"] = check->failures;
          j["notes"] = check->notes;
        } else {
          j["checked"] = 1;
          j["lhs"] = fraction_string(identity->lhs);
          j["rhs"] = fraction_string(identity->rhs);
        }
        out << j.dump() << '\n';
      } else {
        out << (check ? check->summary() : identity->summary()) << '\n'
            << (passed ? "PASS" : "FAIL") << '\n';
      }
      return passed ? kExitOk : kExitInternal;
    }

    if (simulate->parsed()) {
      Dataset data;
      if (table) {
        data = exact_table_dataset(sim_src.scenario.empty() ? sim_src.model_path : sim_src.scenario);
      } else {
        if (sim_n < 1 || simulate->count("--seed") == 0)
          throw ValidationError("simulate requires -n and --seed (or --table)");
        const Model model = sim_src.finite();
        data = sample_dataset(model, sim_n, sim_seed, sampling,
                              sim_src.scenario.empty() ? sim_src.model_path : sim_src.scenario);
      }
      if (sim_out.empty()) {
        write_csv(data, out);
      } else {
        save_dataset(data, sim_out);
        if (json) out << provenance_json(data.provenance) << '\n';
      }
      return kExitOk;
    }

    if (estimate->parsed()) {
      const Model model = est_src.finite();
      const Dataset data = load_dataset(data_path);
      if (auto issues = data.problems(model); !issues.empty()) throw ValidationError(issues.front());
      const Value t = parse_value_flag(est_t, "--t");
      ExactEngine ex(model);
      const Estimate e =
          ipw_ate_estimate(data, propensities(ex, est_treatment, t), est_treatment, est_outcome, t);
      if (json) {
        nlohmann::ordered_json j;
        j["estimand"] = "E[" + est_outcome + "[" + est_treatment + "=" + t.to_string() + "]]";
        j.update(estimate_json(e));
        out << j.dump() << '\n';
      } else {
        out << render_estimate(e) << '\n';
      }
      return kExitOk;
    }

    if (optimize->parsed()) {
      const Model model = opt_src.finite();
      ExactEngine ex(model);
      std::vector<UnitId> users;
      for (UnitId u = 1; u <= model.population.count(); ++u) users.push_back(u);
      AllocationProblem problem;
      if (tau_source == "exact") {
        problem = exact_tau_problem(ex, users, opt_treatment, opt_outcome);
      } else {
        if (opt_data.empty()) throw ValidationError("--tau empirical requires --data");
        problem = empirical_tau_problem(load_dataset(opt_data), model, users, opt_treatment,
                                        opt_outcome);
      }
      if (score == "complier") use_complier_scores(problem, ex, opt_treatment, opt_outcome);
      if (!costs_path.empty()) {
        std::ifstream costs(costs_path);
        if (!costs) throw Error("cannot read " + costs_path);
        apply_costs_csv(problem, costs);
      } else {
        for (auto& row : problem.cost)
          for (std::size_t j = 1; j < row.size(); ++j) row[j] = 1;
      }
      problem.budget = to_rational(parse_value_flag(budget_text, "--budget"));
      const Policy policy =
          algorithm == "exact" ? allocate_exact(problem) : allocate_greedy(problem);
      if (policy.total_cost > problem.budget)
        throw InternalError("allocator exceeded the budget");
      if (policy_out.empty()) {
        write_policy_csv(problem, policy, out);
      } else {
        auto f = open_out(policy_out);
        write_policy_csv(problem, policy, *f);
      }
      if (!policy_out.empty() || json) out << policy_summary_json(policy) << '\n';
      return kExitOk;
    }

    if (list->parsed()) {
      for (const auto& name : builtin_names()) {
        const Scenario s = builtin(name);
        if (json) {
          nlohmann::ordered_json j;
          j["name"] = name;
          j["description"] = s.description;
          out << j.dump() << '\n';
        } else {
          out << name << '\n';
        }
      }
      return kExitOk;
    }

    if (show->parsed()) {
      const Scenario s = builtin(show_name);
      out << "# " << s.name << "\n";
      if (!s.description.empty()) out << "# " << s.description << "\n";
      out << "\n";
      if (!s.model_text.empty()) out << s.model_text << (s.model_text.back() == '\n' ? "" : "\n");
      out << "\nexpected values:\n";
      for (const auto& e : s.expected) {
        out << "  " << to_string(parse_query(e.query)) << " = ";
        if (e.value)
          out << fraction_string(*e.value);
        else
          out << "~" << fixed(e.approx.value_or(0));
        out << "  [" << to_string(e.mode) << "]\n";
      }
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NullEventError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const PositivityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace disco
