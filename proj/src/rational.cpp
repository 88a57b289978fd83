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

#include "disco/rational.hpp"

#include <cstdio>
#include <limits>

#include "disco/error.hpp"

namespace disco {

Value to_value(const Rational& r) {
  const mpz_class& n = r.get_num();
  const mpz_class& d = r.get_den();
  if (!n.fits_slong_p() || !d.fits_slong_p())
    throw DomainError("rational " + r.get_str() + " does not fit a value");
  return Value(n.get_si(), d.get_si());
}

std::string fraction_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string decimal_string(const Rational& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.5g", r.get_d());
  return buf;
}

}  // namespace disco
