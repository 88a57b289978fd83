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

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace disco {

// A small exact rational used for variable and noise values.
//
// Always normalized: den > 0 and gcd(|num|, den) == 1. Arithmetic is
// overflow-checked and throws DomainError instead of wrapping.
class Value {
 public:
  constexpr Value() = default;
  constexpr Value(std::int64_t integer) : num_(integer) {}  // NOLINT
  Value(std::int64_t num, std::int64_t den);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // "3", "-1/2".
  std::string to_string() const;
  // Integers as "3", terminating fractions as decimals ("0.25"), other
  // values as "p/q".
  std::string to_csv_string() const;

  // Accepts "3", "-7", "1/2", "-0.25".
  static Value parse(std::string_view text);
  static bool try_parse(std::string_view text, Value& out);

  friend Value operator+(const Value& a, const Value& b);
  friend Value operator-(const Value& a, const Value& b);
  friend Value operator*(const Value& a, const Value& b);
  friend Value operator/(const Value& a, const Value& b);
  Value operator-() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  friend std::ostream& operator<<(std::ostream& os, const Value& v) {
    return os << v.to_string();
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace disco

template <>
struct std::hash<disco::Value> {
  std::size_t operator()(const disco::Value& v) const noexcept {
    const auto h = std::hash<std::int64_t>{}(v.num());
    return h ^ (std::hash<std::int64_t>{}(v.den()) + 0x9e3779b97f4a7c15ULL +
                (h << 6) + (h >> 2));
  }
};
