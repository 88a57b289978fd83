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

#include "disco/query.hpp"

#include <algorithm>
#include <set>

#include "disco/error.hpp"
#include "lexer.hpp"

namespace disco {
namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

std::string values_text(const std::vector<Value>& values) {
  if (values.size() == 1) return "=" + values.front().to_string();
  std::string out = " in {";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i].to_string();
  }
  return out + "}";
}

void normalize_values(std::vector<Value>& values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : ts_(detail::tokenize(text)) {}

  Query parse() {
    Query q;
    const Token& head = ts_.peek();
    if (head.is("P")) {
      ts_.next();
      ts_.expect("(");
      q.kind = Query::Kind::Probability;
      q.targets = parse_events();
      parse_tail(q);
      ts_.expect(")");
    } else if (head.is("E")) {
      ts_.next();
      ts_.expect("[");
      q.kind = Query::Kind::Expectation;
      auto [world, var] = parse_worldvar();
      q.expectation_world = std::move(world);
      q.expectation_variable = std::move(var);
      parse_tail(q);
      ts_.expect("]");
    } else {
      ts_.fail("expected 'P(' or 'E['");
    }
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return q;
  }

 private:
  void parse_tail(Query& q) {
    if (ts_.accept("|")) {
      const Token at = ts_.peek();
      q.evidence = parse_events();
      for (const auto& e : q.evidence)
        if (!e.world.is_factual())
          throw ParseError("evidence must refer to the factual world", at.line, at.column);
    }
    if (ts_.accept(";")) q.restriction = parse_unitref();
  }

  std::string name() {
    if (ts_.peek().kind != TokenKind::Identifier) ts_.fail("expected variable name");
    return ts_.next().text;
  }

  Value value() {
    const bool negative = ts_.accept("-");
    if (ts_.peek().kind != TokenKind::Number) ts_.fail("expected number");
    Value v;
    if (!Value::try_parse(ts_.next().text, v)) ts_.fail("bad number");
    if (ts_.accept("/")) {
      if (ts_.peek().kind != TokenKind::Number) ts_.fail("expected denominator");
      Value d;
      if (!Value::try_parse(ts_.next().text, d) || d.is_zero()) ts_.fail("bad denominator");
      v = v / d;
    }
    return negative ? -v : v;
  }

  std::pair<WorldRef, std::string> parse_worldvar() {
    std::string var = name();
    if (!ts_.accept("[")) return {WorldRef::factual(), std::move(var)};
    Intervention iv;
    if (!ts_.accept("]")) {
      do {
        const Token at = ts_.peek();
        std::string target = name();
        ts_.expect("=");
        if (!iv.emplace(target, value()).second)
          throw ParseError("variable " + target + " intervened twice", at.line, at.column);
      } while (ts_.accept(","));
      ts_.expect("]");
    }
    return {WorldRef::counterfactual(std::move(iv)), std::move(var)};
  }

  std::vector<Event> parse_events() {
    std::vector<Event> events;
    do {
      auto [world, var] = parse_worldvar();
      Event e{std::move(world), std::move(var), {}};
      if (ts_.accept("=")) {
        e.values.push_back(value());
      } else if (ts_.accept("in")) {
        ts_.expect("{");
        do {
          e.values.push_back(value());
        } while (ts_.accept(","));
        ts_.expect("}");
      } else {
        ts_.fail("expected '=' or 'in'");
      }
      normalize_values(e.values);
      events.push_back(std::move(e));
    } while (ts_.accept(","));
    return events;
  }

  UnitRestriction parse_unitref() {
    UnitRestriction r;
    if (ts_.accept("unit")) {
      ts_.expect("=");
      const Token at = ts_.peek();
      const Value v = value();
      if (!v.is_integer()) throw ParseError("unit id must be an integer", at.line, at.column);
      r.kind = UnitRestriction::Kind::Unit;
      r.unit = v.num();
    } else if (ts_.accept("group")) {
      ts_.expect("=");
      r.kind = UnitRestriction::Kind::Group;
      r.group = name();
    } else {
      ts_.fail("expected 'unit=' or 'group='");
    }
    return r;
  }

  TokenStream ts_;
};

}  // namespace

std::string WorldRef::tag() const {
  if (is_factual()) return "";
  return "[" + disco::to_string(*intervention_) + "]";
}

std::strong_ordering operator<=>(const WorldRef& a, const WorldRef& b) {
  if (a.is_factual() || b.is_factual())
    return static_cast<int>(!a.is_factual()) <=> static_cast<int>(!b.is_factual());
  const auto& x = *a.intervention_;
  const auto& y = *b.intervention_;
  return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
}

std::string Event::to_string() const { return variable + world.tag() + values_text(values); }

std::strong_ordering operator<=>(const Event& a, const Event& b) {
  if (auto c = a.world <=> b.world; c != 0) return c;
  if (auto c = a.variable <=> b.variable; c != 0) return c;
  return std::lexicographical_compare_three_way(a.values.begin(), a.values.end(),
                                                b.values.begin(), b.values.end());
}

std::string UnitRestriction::to_string() const {
  return kind == Kind::Unit ? "unit=" + std::to_string(unit) : "group=" + group;
}

Query Query::probability(std::vector<Event> targets, std::vector<Event> evidence) {
  Query q;
  q.kind = Kind::Probability;
  q.targets = std::move(targets);
  q.evidence = std::move(evidence);
  return q;
}

Query Query::expectation(std::string variable, WorldRef world, std::vector<Event> evidence) {
  Query q;
  q.kind = Kind::Expectation;
  q.expectation_variable = std::move(variable);
  q.expectation_world = std::move(world);
  q.evidence = std::move(evidence);
  return q;
}

std::vector<WorldRef> Query::counterfactual_worlds() const {
  std::set<WorldRef> worlds;
  if (kind == Kind::Probability) {
    for (const auto& e : targets)
      if (!e.world.is_factual()) worlds.insert(e.world);
  } else if (!expectation_world.is_factual()) {
    worlds.insert(expectation_world);
  }
  return {worlds.begin(), worlds.end()};
}

bool Query::references_factual_world() const {
  if (kind == Kind::Expectation) return expectation_world.is_factual();
  return std::any_of(targets.begin(), targets.end(),
                     [](const Event& e) { return e.world.is_factual(); });
}

Query parse_query(std::string_view text) { return QueryParser(text).parse(); }

Query canonical(Query q) {
  for (auto& e : q.targets) normalize_values(e.values);
  for (auto& e : q.evidence) normalize_values(e.values);
  std::sort(q.targets.begin(), q.targets.end());
  std::sort(q.evidence.begin(), q.evidence.end());
  return q;
}

std::string to_string(const Query& query) {
  const Query q = canonical(query);
  auto join = [](const std::vector<Event>& events) {
    std::string out;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (i) out += ", ";
      out += events[i].to_string();
    }
    return out;
  };
  std::string out;
  if (q.kind == Query::Kind::Probability) {
    out = "P(" + join(q.targets);
  } else {
    out = "E[" + q.expectation_variable + q.expectation_world.tag();
  }
  if (!q.evidence.empty()) out += " | " + join(q.evidence);
  if (q.restriction) out += " ; " + q.restriction->to_string();
  out += q.kind == Query::Kind::Probability ? ")" : "]";
  return out;
}

ValidationReport validate_query(const Query& query, const Model& model) {
  ValidationReport report;
  auto& out = report.violations;
  auto check_world = [&](const WorldRef& w) {
    if (w.is_factual()) return;
    for (const auto& [var, value] : w.intervention()) {
      const VariableDecl* decl = model.find_variable(var);
      if (!decl) {
        out.push_back("intervention on undeclared variable " + var);
      } else if (std::find(decl->domain.begin(), decl->domain.end(), value) ==
                 decl->domain.end()) {
        out.push_back("intervention value " + value.to_string() + " outside domain of " + var);
      }
    }
  };
  auto check_event = [&](const Event& e) {
    check_world(e.world);
    const VariableDecl* decl = model.find_variable(e.variable);
    if (!decl) {
      out.push_back("undeclared variable " + e.variable);
      return;
    }
    if (e.values.empty()) out.push_back("event on " + e.variable + " has no values");
    for (const auto& v : e.values)
      if (std::find(decl->domain.begin(), decl->domain.end(), v) == decl->domain.end())
        out.push_back("value " + v.to_string() + " outside domain of " + e.variable);
  };
  if (query.kind == Query::Kind::Probability) {
    if (query.targets.empty()) out.push_back("probability query without events");
    for (const auto& e : query.targets) check_event(e);
  } else {
    check_world(query.expectation_world);
    if (!model.find_variable(query.expectation_variable))
      out.push_back("undeclared variable " + query.expectation_variable);
  }
  for (const auto& e : query.evidence) {
    if (!e.world.is_factual()) out.push_back("evidence must refer to the factual world");
    check_event(e);
  }
  if (query.restriction) {
    const auto& r = *query.restriction;
    if (r.kind == UnitRestriction::Kind::Unit) {
      if (r.unit < 1 || r.unit > model.population.count())
        out.push_back("unit " + std::to_string(r.unit) + " outside population");
    } else if (!model.population.group_index(r.group)) {
      out.push_back("unknown group " + r.group);
    }
  }
  return report;
}

}  // namespace disco
