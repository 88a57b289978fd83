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

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "disco/error.hpp"
#include "lexer.hpp"

namespace disco {
namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

constexpr std::int64_t kMaxSugarDenominator = 1'000'000;

struct Line {
  std::string_view text;
  std::size_t number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t start = 0, number = 1;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number++});
    start = end + 1;
  }
  return lines;
}

Value parse_value(TokenStream& ts) {
  const bool negative = ts.accept("-");
  const Token& t = ts.peek();
  if (t.kind != TokenKind::Number) ts.fail("expected number");
  Value v;
  if (!Value::try_parse(ts.next().text, v)) ts.fail("bad number");
  if (ts.accept("/")) {
    const Token& d = ts.peek();
    if (d.kind != TokenKind::Number) ts.fail("expected denominator");
    Value den;
    if (!Value::try_parse(ts.next().text, den) || den.is_zero() || !den.is_integer())
      ts.fail("bad denominator");
    v = v / den;
  }
  return negative ? -v : v;
}

Rational parse_prob(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind != TokenKind::Number) ts.fail("expected probability");
  Value num;
  if (!Value::try_parse(ts.next().text, num)) ts.fail("bad probability");
  Rational p = to_rational(num);
  if (ts.accept("/")) {
    const Token& d = ts.peek();
    if (d.kind != TokenKind::Number) ts.fail("expected denominator");
    Value den;
    if (!Value::try_parse(ts.next().text, den) || den.is_zero())
      ts.fail("bad denominator");
    p /= to_rational(den);
  }
  return p;
}

std::int64_t parse_int(TokenStream& ts) {
  const Token& t = ts.peek();
  Value v = parse_value(ts);
  if (!v.is_integer()) throw ParseError("expected integer", t.line, t.column);
  return v.num();
}

std::string expect_name(TokenStream& ts, const char* what) {
  if (ts.peek().kind != TokenKind::Identifier) ts.fail(std::string("expected ") + what);
  return ts.next().text;
}

FinitePmf parse_pmf_entries(TokenStream& ts) {
  std::vector<PmfEntry> entries;
  while (!ts.at_end()) {
    Value v = parse_value(ts);
    ts.expect(":");
    entries.push_back({v, parse_prob(ts)});
    ts.accept(",");
  }
  if (entries.empty()) ts.fail("expected value:probability pairs");
  return FinitePmf(std::move(entries));
}

void expect_end(TokenStream& ts) {
  if (!ts.at_end()) ts.fail("unexpected trailing input");
}

struct SugaredNoise {
  std::vector<std::pair<std::string, FinitePmf>> by_group;
  std::size_t line = 0;
};

class ModelReader {
 public:
  Model read(std::string_view text) {
    enum class Section { None, Units, Noise, Var, Eq, Coupling };
    Section section = Section::None;
    bool saw_count = false, saw_coupling = false, in_features = false;
    std::vector<std::pair<UnitId, Rational>> weights;
    std::vector<std::string> feature_names;
    std::map<UnitId, std::vector<Value>> feature_rows;
    std::vector<std::tuple<std::string, std::int64_t, std::int64_t, Token>> ranges;

    // Indexes of the current section's declaration; vectors grow while
    // reading so pointers would dangle.
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::size_t noise_at = kNone, var_at = kNone, eq_at = kNone;
    bool eq_has_parents = false, eq_has_noises = false;
    std::vector<std::tuple<std::size_t, bool, bool>> inferred;

    auto close_eq = [&] {
      if (eq_at != kNone) inferred.emplace_back(eq_at, eq_has_parents, eq_has_noises);
      eq_at = kNone;
    };

    for (const Line& line : split_lines(text)) {
      TokenStream ts(detail::tokenize(line.text, line.number, 1));
      if (ts.at_end()) continue;
      if (ts.peek().is("[")) {
        close_eq();
        ts.next();
        const Token kind = ts.peek();
        const std::string word = expect_name(ts, "section kind");
        noise_at = var_at = kNone;
        in_features = false;
        if (word == "units") {
          section = Section::Units;
        } else if (word == "coupling") {
          section = Section::Coupling;
        } else if (word == "noise" || word == "var" || word == "eq") {
          const std::string name = expect_name(ts, "name");
          if (word == "noise") {
            section = Section::Noise;
            model_.noises.push_back({name, {}});
            noise_at = model_.noises.size() - 1;
          } else if (word == "var") {
            section = Section::Var;
            model_.variables.push_back({name, {}});
            var_at = model_.variables.size() - 1;
          } else {
            section = Section::Eq;
            model_.equations.push_back({name, {}, {}, {}});
            eq_at = model_.equations.size() - 1;
            eq_has_parents = eq_has_noises = false;
          }
        } else {
          throw ParseError("unknown section '" + word + "'", kind.line, kind.column);
        }
        ts.expect("]");
        expect_end(ts);
        continue;
      }

      switch (section) {
        case Section::None:
          ts.fail("content outside of a section");
        case Section::Units: {
          if (ts.peek().kind == TokenKind::Number) {
            if (!in_features) ts.fail("feature row before 'features:' header");
            const UnitId unit = parse_int(ts);
            ts.expect(":");
            std::vector<Value> row;
            while (!ts.at_end()) {
              row.push_back(parse_value(ts));
              ts.accept(",");
            }
            if (!feature_rows.emplace(unit, std::move(row)).second)
              throw ParseError("duplicate feature row for unit " + std::to_string(unit),
                               line.number, 1);
            break;
          }
          const Token key = ts.peek();
          const std::string word = expect_name(ts, "units entry");
          if (word == "count") {
            ts.expect(":");
            const std::int64_t n = parse_int(ts);
            if (n < 1) throw ParseError("count must be positive", key.line, key.column);
            model_.population = UnitPopulation(n);
            saw_count = true;
          } else if (word == "group") {
            const std::string name = expect_name(ts, "group name");
            ts.expect(":");
            do {
              const Token at = ts.peek();
              const std::int64_t lo = parse_int(ts);
              std::int64_t hi = lo;
              if (ts.accept("..")) hi = parse_int(ts);
              ranges.emplace_back(name, lo, hi, at);
            } while (ts.accept(","));
          } else if (word == "weight") {
            const UnitId unit = parse_int(ts);
            ts.expect(":");
            weights.emplace_back(unit, parse_prob(ts));
          } else if (word == "features") {
            ts.expect(":");
            while (!ts.at_end()) feature_names.push_back(expect_name(ts, "feature name"));
            in_features = true;
          } else {
            throw ParseError("unknown units entry '" + word + "'", key.line, key.column);
          }
          expect_end(ts);
          break;
        }
        case Section::Noise: {
          NoiseDecl* noise = &model_.noises[noise_at];
          const Token key = ts.peek();
          const std::string word = expect_name(ts, "pmf, uniform or group");
          if (word == "pmf") {
            ts.expect(":");
            noise->pmf = parse_pmf_entries(ts);
          } else if (word == "uniform") {
            ts.expect(":");
            const std::int64_t lo = parse_int(ts);
            ts.expect("..");
            const std::int64_t hi = parse_int(ts);
            if (hi < lo) throw ParseError("empty range", key.line, key.column);
            noise->pmf = FinitePmf::uniform_range(lo, hi);
            expect_end(ts);
          } else if (word == "group") {
            const std::string group = expect_name(ts, "group name");
            ts.expect(":");
            const Token pmf_kw = ts.peek();
            if (expect_name(ts, "pmf") != "pmf")
              throw ParseError("expected 'pmf'", pmf_kw.line, pmf_kw.column);
            SugaredNoise& s = sugar_[noise->name];
            s.line = line.number;
            s.by_group.emplace_back(group, parse_pmf_entries(ts));
          } else {
            throw ParseError("unknown noise entry '" + word + "'", key.line, key.column);
          }
          break;
        }
        case Section::Var: {
          VariableDecl* var = &model_.variables[var_at];
          const Token key = ts.peek();
          if (expect_name(ts, "domain") != "domain")
            throw ParseError("expected 'domain'", key.line, key.column);
          ts.expect(":");
          while (!ts.at_end()) {
            const Value lo = parse_value(ts);
            if (ts.accept("..")) {
              const Value hi = parse_value(ts);
              if (!lo.is_integer() || !hi.is_integer() || hi < lo)
                throw ParseError("bad integer range", key.line, key.column);
              for (std::int64_t v = lo.num(); v <= hi.num(); ++v) var->domain.emplace_back(v);
            } else {
              var->domain.push_back(lo);
            }
            ts.accept(",");
          }
          break;
        }
        case Section::Eq: {
          StructuralEquation* eq = &model_.equations[eq_at];
          const Token key = ts.peek();
          std::string group;
          if (ts.accept("*")) {
            group = kDefaultGroup;
          } else {
            group = expect_name(ts, "group name, parents or noises");
          }
          const Token colon = ts.expect(":");
          if (group == "parents" || group == "noises") {
            auto& list = group == "parents" ? eq->parents : eq->noises;
            (group == "parents" ? eq_has_parents : eq_has_noises) = true;
            while (!ts.at_end()) {
              list.push_back(expect_name(ts, "name"));
              ts.accept(",");
            }
            break;
          }
          for (const auto& [g, body] : eq->bodies)
            if (g == group)
              throw ParseError("duplicate body for group " + group, key.line, key.column);
          const std::size_t offset = colon.column;  // 1-based column of ':'
          eq->bodies.emplace_back(
              group, parse_expr(line.text.substr(offset), line.number, offset + 1));
          break;
        }
        case Section::Coupling: {
          const Token key = ts.peek();
          const std::string word = expect_name(ts, "disco or scm");
          if (word != "disco" && word != "scm")
            throw ParseError("expected disco or scm", key.line, key.column);
          model_.coupling = parse_coupling(word);
          saw_coupling = true;
          expect_end(ts);
          break;
        }
      }
    }
    close_eq();
    (void)saw_coupling;

    if (!saw_count) throw ParseError("missing [units] count", 1, 1);
    for (const auto& [name, lo, hi, at] : ranges) {
      if (lo < 1 || hi > model_.population.count() || lo > hi)
        throw ParseError("group range outside population", at.line, at.column);
      model_.population.assign(name, lo, hi);
    }
    if (ranges.empty() && model_.population.count() > 0)
      model_.population.assign(kImplicitGroup, 1, model_.population.count());
    if (!weights.empty()) {
      std::vector<Rational> w(static_cast<std::size_t>(model_.population.count()), Rational(0));
      for (const auto& [unit, p] : weights) {
        if (unit < 1 || unit > model_.population.count())
          throw ParseError("weight for unknown unit " + std::to_string(unit), 1, 1);
        w[static_cast<std::size_t>(unit - 1)] = p;
      }
      model_.population.set_weights(std::move(w));
    }
    if (!feature_names.empty()) {
      std::vector<std::vector<Value>> rows;
      for (UnitId u = 1; u <= model_.population.count(); ++u) {
        auto it = feature_rows.find(u);
        if (it == feature_rows.end())
          throw ParseError("missing feature row for unit " + std::to_string(u), 1, 1);
        rows.push_back(it->second);
      }
      model_.population.set_features(feature_names, std::move(rows));
    }

    // Omitted parents/noises lines are inferred from the bodies.
    for (const auto& [at, has_parents, has_noises] : inferred) {
      StructuralEquation& equation = model_.equations[at];
      if (has_parents && has_noises) continue;
      std::set<std::string> ids;
      for (const auto& [g, body] : equation.bodies) body.collect_identifiers(ids);
      for (const auto& v : model_.variables)
        if (!has_parents && ids.count(v.name)) equation.parents.push_back(v.name);
      for (const auto& n : model_.noises)
        if (!has_noises && ids.count(n.name)) equation.noises.push_back(n.name);
    }

    desugar();
    return std::move(model_);
  }

 private:
  // Replaces each group-dependent noise law by a uniform noise on 1..L and a
  // per-group inverse-CDF threshold expression in the consuming equation.
  void desugar() {
    for (auto& [name, sugar] : sugar_) {
      NoiseDecl* decl = nullptr;
      for (auto& n : model_.noises)
        if (n.name == name) decl = &n;
      const auto& groups = model_.population.group_names();

      std::map<std::string, FinitePmf> law;
      for (const auto& g : groups)
        if (!decl->pmf.entries().empty()) law[g] = decl->pmf;
      for (const auto& [g, pmf] : sugar.by_group) {
        if (!model_.population.group_index(g))
          throw ParseError("noise " + name + ": unknown group " + g, sugar.line, 1);
        for (const auto& p : pmf.problems())
          throw ParseError("noise " + name + ", group " + g + ": " + p, sugar.line, 1);
        law[g] = pmf;
      }
      for (const auto& g : groups)
        if (!law.count(g))
          throw ParseError("noise " + name + ": no law for group " + g, sugar.line, 1);

      mpz_class lcm = 1;
      for (const auto& [g, pmf] : law)
        for (const auto& e : pmf.entries())
          mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), e.prob.get_den().get_mpz_t());
      if (lcm > kMaxSugarDenominator)
        throw ParseError("noise " + name + ": group laws need too fine a grid", sugar.line, 1);
      const std::int64_t grid = lcm.get_si();

      std::map<std::string, Expr> piece;
      const Expr slot = Expr::ident(name);
      for (const auto& [g, pmf] : law) {
        std::vector<std::pair<std::int64_t, Value>> cuts;
        Rational cumulative = 0;
        for (const auto& e : pmf.entries()) {
          if (e.prob == 0) continue;
          cumulative += e.prob;
          const Rational c = cumulative * grid;
          cuts.emplace_back(c.get_num().get_si(), e.value);
        }
        Expr expr = Expr::constant(cuts.back().second);
        for (std::size_t i = cuts.size() - 1; i-- > 0;)
          expr = Expr::apply(ExprOp::If,
                             {Expr::apply(ExprOp::Le, {slot, Expr::constant(cuts[i].first)}),
                              Expr::constant(cuts[i].second), expr});
        piece.emplace(g, expr);
      }

      decl->pmf = FinitePmf::uniform_range(1, grid);
      for (auto& eq : model_.equations) {
        if (std::find(eq.noises.begin(), eq.noises.end(), name) == eq.noises.end()) continue;
        std::vector<std::pair<std::string, Expr>> bodies;
        for (const auto& g : groups) {
          const Expr* body = eq.body_for(g);
          if (!body) continue;
          bodies.emplace_back(g, body->substitute(name, piece.at(g)));
        }
        eq.bodies = std::move(bodies);
      }
    }
  }

  Model model_;
  std::map<std::string, SugaredNoise> sugar_;
};

bool consecutive_uniform(const FinitePmf& pmf) {
  const auto& e = pmf.entries();
  if (e.size() < 2) return false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e[i].value.is_integer() || e[i].prob != e[0].prob) return false;
    if (i > 0 && e[i].value.num() != e[i - 1].value.num() + 1) return false;
  }
  return e[0].prob == Rational(1, static_cast<unsigned long>(e.size()));
}

std::string prob_string(const Rational& p) {
  if (p.get_den() == 1) return p.get_num().get_str();
  return fraction_string(p);
}

}  // namespace

Model parse_model(std::string_view text) { return ModelReader().read(text); }

std::string format_model(const Model& model) {
  std::ostringstream out;
  const auto& pop = model.population;
  out << "[units]\ncount: " << pop.count() << "\n";
  for (std::size_t g = 0; g < pop.group_names().size(); ++g) {
    const std::string& name = pop.group_names()[g];
    out << "group " << name << ":";
    const auto units = pop.units_in(name);
    for (std::size_t i = 0; i < units.size();) {
      std::size_t j = i;
      while (j + 1 < units.size() && units[j + 1] == units[j] + 1) ++j;
      out << (i ? ", " : " ") << units[i];
      if (j > i) out << ".." << units[j];
      i = j + 1;
    }
    out << "\n";
  }
  if (pop.has_custom_weights())
    for (UnitId u = 1; u <= pop.count(); ++u)
      out << "weight " << u << ": " << prob_string(pop.weight(u)) << "\n";
  if (!pop.feature_names().empty()) {
    out << "features:";
    for (const auto& f : pop.feature_names()) out << " " << f;
    out << "\n";
    for (UnitId u = 1; u <= pop.count(); ++u) {
      out << u << ":";
      for (const auto& v : pop.features(u)) out << " " << v.to_string();
      out << "\n";
    }
  }
  for (const auto& n : model.noises) {
    out << "\n[noise " << n.name << "]\n";
    if (consecutive_uniform(n.pmf)) {
      out << "uniform: " << n.pmf.entries().front().value << ".."
          << n.pmf.entries().back().value << "\n";
    } else {
      out << "pmf:";
      for (const auto& e : n.pmf.entries())
        out << " " << e.value.to_string() << ":" << prob_string(e.prob);
      out << "\n";
    }
  }
  for (const auto& v : model.variables) {
    out << "\n[var " << v.name << "]\ndomain:";
    for (const auto& d : v.domain) out << " " << d.to_string();
    out << "\n";
  }
  for (const auto& eq : model.equations) {
    out << "\n[eq " << eq.target << "]\nparents:";
    for (const auto& p : eq.parents) out << " " << p;
    out << "\nnoises:";
    for (const auto& n : eq.noises) out << " " << n;
    out << "\n";
    for (const auto& [g, body] : eq.bodies) out << g << ": " << body.to_string() << "\n";
  }
  out << "\n[coupling]\n" << to_string(model.coupling) << "\n";
  return out.str();
}

Model load_model_text(std::string_view text) {
  Model m = parse_model(text);
  require_valid(m);
  return m;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_model_text(buf.str());
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write model file " + path.string());
  out << format_model(model);
}

}  // namespace disco
