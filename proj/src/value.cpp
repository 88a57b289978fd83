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

#include "disco/value.hpp"

#include <charconv>
#include <cstdlib>
#include <numeric>

#include "disco/error.hpp"

namespace disco {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw DomainError("value overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw DomainError("value overflow");
  return r;
}

bool parse_int(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Value::Value(std::int64_t num, std::int64_t den) {
  if (den == 0) throw DomainError("division by zero");
  if (den < 0) {
    num = checked_mul(num, -1);
    den = checked_mul(den, -1);
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Value::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::string Value::to_csv_string() const {
  if (den_ == 1) return std::to_string(num_);
  // Terminating decimal iff den has only factors 2 and 5.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return to_string();
  const int digits = std::max(twos, fives);
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale = checked_mul(scale, 10);
  const std::int64_t scaled = checked_mul(num_, scale / den_);
  const std::int64_t mag = std::llabs(scaled);
  std::string frac = std::to_string(mag % scale);
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  return std::string(scaled < 0 ? "-" : "") + std::to_string(mag / scale) +
         "." + frac;
}

bool Value::try_parse(std::string_view text, Value& out) {
  if (text.empty()) return false;
  try {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      std::int64_t n, d;
      if (!parse_int(text.substr(0, slash), n) ||
          !parse_int(text.substr(slash + 1), d) || d == 0)
        return false;
      out = Value(n, d);
      return true;
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      std::string_view whole = text.substr(0, dot);
      std::string_view frac = text.substr(dot + 1);
      if (frac.empty() || frac.size() > 15) return false;
      for (char c : frac)
        if (c < '0' || c > '9') return false;
      bool negative = !whole.empty() && whole.front() == '-';
      if (negative || (!whole.empty() && whole.front() == '+'))
        whole.remove_prefix(1);
      std::int64_t w = 0;
      if (!whole.empty() && !parse_int(whole, w)) return false;
      if (w < 0) return false;
      std::int64_t f = 0;
      if (!parse_int(frac, f)) return false;
      std::int64_t scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      std::int64_t n = checked_add(checked_mul(w, scale), f);
      out = Value(negative ? -n : n, scale);
      return true;
    }
    std::int64_t n;
    if (!parse_int(text, n)) return false;
    out = Value(n);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

Value Value::parse(std::string_view text) {
  Value v;
  if (!try_parse(text, v))
    throw ValidationError("not a number: '" + std::string(text) + "'");
  return v;
}

Value operator+(const Value& a, const Value& b) {
  if (a.den_ == 1 && b.den_ == 1) return Value(checked_add(a.num_, b.num_));
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const std::int64_t lhs = checked_mul(a.num_, b.den_ / g);
  const std::int64_t rhs = checked_mul(b.num_, a.den_ / g);
  return Value(checked_add(lhs, rhs), checked_mul(a.den_ / g, b.den_));
}

Value Value::operator-() const {
  Value r;
  r.num_ = checked_mul(num_, -1);
  r.den_ = den_;
  return r;
}

Value operator-(const Value& a, const Value& b) { return a + (-b); }

Value operator*(const Value& a, const Value& b) {
  if (a.den_ == 1 && b.den_ == 1) return Value(checked_mul(a.num_, b.num_));
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  return Value(checked_mul(a.num_ / g1, b.num_ / g2),
               checked_mul(a.den_ / g2, b.den_ / g1));
}

Value operator/(const Value& a, const Value& b) {
  if (b.num_ == 0) throw DomainError("division by zero");
  return a * Value(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  return lhs <=> rhs;
}

}  // namespace disco
