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

#include "disco/expr.hpp"

#include <algorithm>
#include <array>

#include "disco/error.hpp"
#include "lexer.hpp"

namespace disco {
namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

// Binding strength used by both the parser and the printer.
enum Prec : int {
  kIf = 0,
  kOr = 1,
  kAnd = 2,
  kCmp = 3,
  kAdd = 4,
  kMul = 5,
  kUnary = 6,
  kPrimary = 7,
};

struct BinaryInfo {
  ExprOp op;
  std::string_view symbol;
  int prec;
};

constexpr std::array<BinaryInfo, 13> kBinary = {{
    {ExprOp::Or, "||", kOr},
    {ExprOp::And, "&&", kAnd},
    {ExprOp::Eq, "==", kCmp},
    {ExprOp::Ne, "!=", kCmp},
    {ExprOp::Lt, "<", kCmp},
    {ExprOp::Le, "<=", kCmp},
    {ExprOp::Gt, ">", kCmp},
    {ExprOp::Ge, ">=", kCmp},
    {ExprOp::Add, "+", kAdd},
    {ExprOp::Sub, "-", kAdd},
    {ExprOp::Mul, "*", kMul},
    {ExprOp::Div, "/", kMul},
    // placeholder so the array size is stable if ops are added
    {ExprOp::Const, "", -1},
}};

const BinaryInfo* binary_info(ExprOp op) {
  for (const auto& b : kBinary)
    if (b.prec >= 0 && b.op == op) return &b;
  return nullptr;
}

struct FunctionInfo {
  std::string_view name;
  ExprOp op;
  std::size_t arity;
};

constexpr std::array<FunctionInfo, 4> kFunctions = {{
    {"min", ExprOp::Min, 2},
    {"max", ExprOp::Max, 2},
    {"clamp", ExprOp::Clamp, 3},
    {"ind", ExprOp::Ind, 1},
}};

bool reserved(std::string_view word) {
  static constexpr std::array<std::string_view, 10> kWords = {
      "if", "then", "else", "in", "feat", "unit",
      "min", "max", "clamp", "ind"};
  return std::find(kWords.begin(), kWords.end(), word) != kWords.end();
}

// Folds unary minus and division of literals so that printed constants
// ("-1", "1/5") parse back to the same tree.
Expr fold(ExprOp op, std::vector<Expr> args) {
  if (op == ExprOp::Neg && args[0].op() == ExprOp::Const)
    return Expr::constant(-args[0].node().value);
  if (op == ExprOp::Div && args[0].op() == ExprOp::Const &&
      args[1].op() == ExprOp::Const && !args[1].node().value.is_zero() &&
      args[0].node().value.is_integer() && args[1].node().value.is_integer())
    return Expr::constant(args[0].node().value / args[1].node().value);
  return Expr::apply(op, std::move(args));
}

class ExprParser {
 public:
  explicit ExprParser(TokenStream& ts) : ts_(ts) {}

  Expr parse() { return parse_if(); }

 private:
  Expr parse_if() {
    if (ts_.accept("if")) {
      Expr cond = parse_if();
      ts_.expect("then");
      Expr then_branch = parse_if();
      ts_.expect("else");
      Expr else_branch = parse_if();
      return Expr::apply(ExprOp::If, {cond, then_branch, else_branch});
    }
    return parse_binary(kOr);
  }

  const BinaryInfo* peek_binary(int prec) {
    const Token& t = ts_.peek();
    if (t.kind != TokenKind::Symbol) return nullptr;
    for (const auto& b : kBinary)
      if (b.prec == prec && t.text == b.symbol) return &b;
    return nullptr;
  }

  Expr parse_binary(int prec) {
    if (prec == kUnary) return parse_unary();
    Expr lhs = parse_binary(prec + 1);
    if (prec == kCmp) {
      if (const BinaryInfo* b = peek_binary(prec)) {
        ts_.next();
        Expr rhs = parse_binary(prec + 1);
        lhs = Expr::apply(b->op, {lhs, rhs});
        if (peek_binary(prec)) ts_.fail("comparisons do not chain");
      }
      return lhs;
    }
    while (const BinaryInfo* b = peek_binary(prec)) {
      ts_.next();
      Expr rhs = parse_binary(prec + 1);
      lhs = fold(b->op, {lhs, rhs});
    }
    return lhs;
  }

  Expr parse_unary() {
    if (ts_.accept("-")) return fold(ExprOp::Neg, {parse_unary()});
    if (ts_.accept("!")) return Expr::apply(ExprOp::Not, {parse_unary()});
    return parse_primary();
  }

  std::string expect_identifier(const char* what) {
    const Token& t = ts_.peek();
    if (t.kind != TokenKind::Identifier || reserved(t.text))
      ts_.fail(std::string("expected ") + what);
    return ts_.next().text;
  }

  Expr parse_primary() {
    const Token& t = ts_.peek();
    if (t.kind == TokenKind::Number) {
      Value v;
      if (!Value::try_parse(t.text, v)) ts_.fail("bad number");
      ts_.next();
      return Expr::constant(v);
    }
    if (ts_.accept("(")) {
      Expr e = parse_if();
      ts_.expect(")");
      return e;
    }
    if (t.kind != TokenKind::Identifier) ts_.fail("expected expression");
    if (ts_.accept("unit")) return Expr::unit_id();
    if (ts_.accept("in")) {
      ts_.expect("(");
      std::string g = expect_identifier("group name");
      ts_.expect(")");
      return Expr::named(ExprOp::InGroup, std::move(g));
    }
    if (ts_.accept("feat")) {
      ts_.expect("(");
      std::string f = expect_identifier("feature name");
      ts_.expect(")");
      return Expr::named(ExprOp::Feature, std::move(f));
    }
    for (const auto& fn : kFunctions) {
      if (t.text != fn.name) continue;
      ts_.next();
      ts_.expect("(");
      std::vector<Expr> args;
      args.push_back(parse_if());
      while (ts_.accept(",")) args.push_back(parse_if());
      if (args.size() != fn.arity)
        ts_.fail(std::string(fn.name) + " takes " +
                 std::to_string(fn.arity) + " argument(s)");
      ts_.expect(")");
      return Expr::apply(fn.op, std::move(args));
    }
    if (reserved(t.text)) ts_.fail("unexpected keyword");
    return Expr::ident(ts_.next().text);
  }

  TokenStream& ts_;
};

int precedence(const Expr& e) {
  switch (e.op()) {
    case ExprOp::Const: {
      const Value& v = e.node().value;
      if (!v.is_integer()) return kMul;
      return v.num() < 0 ? kUnary : kPrimary;
    }
    case ExprOp::If:
      return kIf;
    case ExprOp::Neg:
    case ExprOp::Not:
      return kUnary;
    default:
      if (const BinaryInfo* b = binary_info(e.op())) return b->prec;
      return kPrimary;
  }
}

void print(const Expr& e, int min_prec, std::string& out) {
  const int prec = precedence(e);
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  const auto& n = e.node();
  switch (n.op) {
    case ExprOp::Const:
      out += n.value.to_string();
      break;
    case ExprOp::Ident:
      out += n.name;
      break;
    case ExprOp::UnitId:
      out += "unit";
      break;
    case ExprOp::InGroup:
      out += "in(" + n.name + ")";
      break;
    case ExprOp::Feature:
      out += "feat(" + n.name + ")";
      break;
    case ExprOp::Neg:
      out += '-';
      print(n.args[0], kUnary, out);
      break;
    case ExprOp::Not:
      out += '!';
      print(n.args[0], kUnary, out);
      break;
    case ExprOp::If:
      out += "if ";
      print(n.args[0], kIf, out);
      out += " then ";
      print(n.args[1], kIf, out);
      out += " else ";
      print(n.args[2], kIf, out);
      break;
    case ExprOp::Min:
    case ExprOp::Max:
    case ExprOp::Clamp:
    case ExprOp::Ind: {
      for (const auto& fn : kFunctions)
        if (fn.op == n.op) out += fn.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print(n.args[i], kIf, out);
      }
      out += ')';
      break;
    }
    default: {
      const BinaryInfo* b = binary_info(n.op);
      // Comparisons are non-associative; the others associate left.
      const int rhs_prec = prec + 1;
      const int lhs_prec = prec == kCmp ? prec + 1 : prec;
      print(n.args[0], lhs_prec, out);
      out += ' ';
      out += b->symbol;
      out += ' ';
      print(n.args[1], rhs_prec, out);
      break;
    }
  }
  if (paren) out += ')';
}

Value truth(bool b) { return Value(b ? 1 : 0); }

}  // namespace

Expr Expr::constant(Value v) {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::Const;
  n->value = v;
  return Expr(std::move(n));
}

Expr Expr::ident(std::string name) { return named(ExprOp::Ident, std::move(name)); }

Expr Expr::named(ExprOp op, std::string name) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unit_id() {
  auto n = std::make_shared<Node>();
  n->op = ExprOp::UnitId;
  return Expr(std::move(n));
}

Expr Expr::apply(ExprOp op, std::vector<Expr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return Expr(std::move(n));
}

void Expr::collect_identifiers(std::set<std::string>& out) const {
  if (op() == ExprOp::Ident) out.insert(node().name);
  for (const auto& a : node().args) a.collect_identifiers(out);
}

void Expr::collect_features(std::set<std::string>& out) const {
  if (op() == ExprOp::Feature) out.insert(node().name);
  for (const auto& a : node().args) a.collect_features(out);
}

void Expr::collect_groups(std::set<std::string>& out) const {
  if (op() == ExprOp::InGroup) out.insert(node().name);
  for (const auto& a : node().args) a.collect_groups(out);
}

Expr Expr::substitute(const std::string& name, const Expr& replacement) const {
  if (op() == ExprOp::Ident) return node().name == name ? replacement : *this;
  if (node().args.empty()) return *this;
  std::vector<Expr> args;
  args.reserve(node().args.size());
  for (const auto& a : node().args) args.push_back(a.substitute(name, replacement));
  return apply(op(), std::move(args));
}

Expr Expr::rename(const std::map<std::string, std::string>& names) const {
  if (op() == ExprOp::Ident) {
    auto it = names.find(node().name);
    return it == names.end() ? *this : ident(it->second);
  }
  if (node().args.empty()) return *this;
  std::vector<Expr> args;
  args.reserve(node().args.size());
  for (const auto& a : node().args) args.push_back(a.rename(names));
  return apply(op(), std::move(args));
}

std::string Expr::to_string() const {
  std::string out;
  print(*this, kIf, out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = a.node();
  const auto& y = b.node();
  return x.op == y.op && x.value == y.value && x.name == y.name &&
         x.args == y.args;
}

Expr parse_expr(std::string_view text, std::size_t line, std::size_t column) {
  TokenStream ts(detail::tokenize(text, line, column));
  ExprParser parser(ts);
  Expr e = parser.parse();
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return e;
}

// --- compilation ----------------------------------------------------------

namespace {

constexpr std::size_t kMaxStack = 64;

std::int32_t index_of(const std::vector<std::string>& names,
                      const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<std::int32_t>(it - names.begin());
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& expr, const ExprScope& scope) {
  emit(expr, scope);
  // Conservative bound: the simulated depth below.
  std::size_t depth = 0, peak = 0;
  for (const auto& in : code_) {
    switch (in.code) {
      case Code::Push:
      case Code::LoadVar:
      case Code::LoadNoise:
      case Code::LoadUnit:
      case Code::InGroup:
      case Code::LoadFeature:
        ++depth;
        break;
      case Code::Neg:
      case Code::Not:
      case Code::Ind:
      case Code::Jump:
        break;
      case Code::Clamp:
        depth -= 2;
        break;
      case Code::JumpIfZero:
        --depth;
        break;
      default:
        --depth;
        break;
    }
    peak = std::max(peak, depth);
  }
  max_stack_ = peak + 1;
  if (max_stack_ > kMaxStack) throw ValidationError("expression too deep");
}

void CompiledExpr::emit(const Expr& expr, const ExprScope& scope) {
  const auto& n = expr.node();
  auto op_code = [&](Code c) {
    for (const auto& a : n.args) emit(a, scope);
    code_.push_back({c});
  };
  switch (n.op) {
    case ExprOp::Const:
      code_.push_back({Code::Push, 0, n.value});
      return;
    case ExprOp::Ident: {
      if (auto i = index_of(scope.variables, n.name); i >= 0) {
        code_.push_back({Code::LoadVar, i});
        return;
      }
      if (auto i = index_of(scope.noises, n.name); i >= 0) {
        code_.push_back({Code::LoadNoise, i});
        return;
      }
      throw ValidationError("unresolved name '" + n.name + "'");
    }
    case ExprOp::UnitId:
      code_.push_back({Code::LoadUnit});
      return;
    case ExprOp::InGroup: {
      auto i = index_of(scope.groups, n.name);
      if (i < 0) throw ValidationError("unknown group '" + n.name + "'");
      code_.push_back({Code::InGroup, i});
      return;
    }
    case ExprOp::Feature: {
      auto i = index_of(scope.features, n.name);
      if (i < 0) throw ValidationError("unknown feature '" + n.name + "'");
      code_.push_back({Code::LoadFeature, i});
      return;
    }
    case ExprOp::If: {
      emit(n.args[0], scope);
      const std::size_t jz = code_.size();
      code_.push_back({Code::JumpIfZero});
      emit(n.args[1], scope);
      const std::size_t jmp = code_.size();
      code_.push_back({Code::Jump});
      code_[jz].arg = static_cast<std::int32_t>(code_.size());
      emit(n.args[2], scope);
      code_[jmp].arg = static_cast<std::int32_t>(code_.size());
      return;
    }
    case ExprOp::Neg: return op_code(Code::Neg);
    case ExprOp::Not: return op_code(Code::Not);
    case ExprOp::Ind: return op_code(Code::Ind);
    case ExprOp::Add: return op_code(Code::Add);
    case ExprOp::Sub: return op_code(Code::Sub);
    case ExprOp::Mul: return op_code(Code::Mul);
    case ExprOp::Div: return op_code(Code::Div);
    case ExprOp::Eq: return op_code(Code::Eq);
    case ExprOp::Ne: return op_code(Code::Ne);
    case ExprOp::Lt: return op_code(Code::Lt);
    case ExprOp::Le: return op_code(Code::Le);
    case ExprOp::Gt: return op_code(Code::Gt);
    case ExprOp::Ge: return op_code(Code::Ge);
    case ExprOp::And: return op_code(Code::And);
    case ExprOp::Or: return op_code(Code::Or);
    case ExprOp::Min: return op_code(Code::Min);
    case ExprOp::Max: return op_code(Code::Max);
    case ExprOp::Clamp: return op_code(Code::Clamp);
  }
}

Value CompiledExpr::evaluate(std::span<const Value> variables,
                             std::span<const Value> noises,
                             const UnitContext& unit) const {
  std::array<Value, kMaxStack> stack;
  std::size_t sp = 0;
  const std::size_t n = code_.size();
  for (std::size_t pc = 0; pc < n; ++pc) {
    const Instr& in = code_[pc];
    switch (in.code) {
      case Code::Push: stack[sp++] = in.constant; break;
      case Code::LoadVar: stack[sp++] = variables[static_cast<std::size_t>(in.arg)]; break;
      case Code::LoadNoise: stack[sp++] = noises[static_cast<std::size_t>(in.arg)]; break;
      case Code::LoadUnit: stack[sp++] = Value(unit.unit); break;
      case Code::InGroup:
        stack[sp++] = truth(unit.group == static_cast<std::size_t>(in.arg));
        break;
      case Code::LoadFeature: stack[sp++] = unit.features[static_cast<std::size_t>(in.arg)]; break;
      case Code::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Code::Not: stack[sp - 1] = truth(stack[sp - 1].is_zero()); break;
      case Code::Ind: stack[sp - 1] = truth(!stack[sp - 1].is_zero()); break;
      case Code::JumpIfZero:
        if (stack[--sp].is_zero()) pc = static_cast<std::size_t>(in.arg) - 1;
        break;
      case Code::Jump: pc = static_cast<std::size_t>(in.arg) - 1; break;
      case Code::Clamp: {
        const Value hi = stack[--sp];
        const Value lo = stack[--sp];
        Value& x = stack[sp - 1];
        if (x < lo) x = lo;
        if (x > hi) x = hi;
        break;
      }
      default: {
        const Value b = stack[--sp];
        Value& a = stack[sp - 1];
        switch (in.code) {
          case Code::Add: a = a + b; break;
          case Code::Sub: a = a - b; break;
          case Code::Mul: a = a * b; break;
          case Code::Div: a = a / b; break;
          case Code::Eq: a = truth(a == b); break;
          case Code::Ne: a = truth(a != b); break;
          case Code::Lt: a = truth(a < b); break;
          case Code::Le: a = truth(a <= b); break;
          case Code::Gt: a = truth(a > b); break;
          case Code::Ge: a = truth(a >= b); break;
          case Code::And: a = truth(!a.is_zero() && !b.is_zero()); break;
          case Code::Or: a = truth(!a.is_zero() || !b.is_zero()); break;
          case Code::Min: a = std::min(a, b); break;
          case Code::Max: a = std::max(a, b); break;
          default: throw InternalError("bad opcode");
        }
      }
    }
  }
  return stack[0];
}

}  // namespace disco
