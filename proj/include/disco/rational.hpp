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

#include <gmpxx.h>

#include <string>

#include "disco/value.hpp"

namespace disco {

// Arbitrary-precision exact rational. Probabilities and expectations are
// carried in this type end to end in the exact engine.
using Rational = mpq_class;

// A probability; always canonical and within [0, 1] when produced by the
// exact engine.
using ExactProb = Rational;

inline Rational to_rational(const Value& v) {
  Rational r(mpz_class(static_cast<long>(v.num())),
             mpz_class(static_cast<long>(v.den())));
  r.canonicalize();
  return r;
}

// Converts back to a small Value; throws DomainError if it does not fit.
Value to_value(const Rational& r);

// Always "p/q", including "1/1" and "0/1".
std::string fraction_string(const Rational& r);

// Decimal rendering with five significant digits ("0.21667", "1.0000").
std::string decimal_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace disco
