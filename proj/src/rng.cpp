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

#include "disco/rng.hpp"

#include <cmath>
#include <numbers>

#include "disco/error.hpp"

namespace disco {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x6469u};
  gen_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InternalError("Rng::below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t x = gen_();
    if (x < limit) return x % n;
  }
}

double Rng::uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform01();
  while (u1 == 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

DiscreteSampler::DiscreteSampler(const std::vector<Rational>& probs) {
  if (probs.empty()) throw DomainError("cannot sample from an empty distribution");
  mpz_class common = 1;
  for (const auto& p : probs) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), p.get_den_mpz_t());
  exact_ = mpz_sizeinbase(common.get_mpz_t(), 2) <= 62;
  Rational running = 0;
  for (const auto& p : probs) {
    running += p;
    if (exact_) {
      const mpz_class scaled = running.get_num() * (common / running.get_den());
      cumulative_.push_back(static_cast<std::uint64_t>(scaled.get_ui()));
    } else {
      cumulative_.push_back(0);
      cumulative_real_.push_back(running.get_d());
    }
  }
  total_ = exact_ ? cumulative_.back() : 0;
}

std::size_t DiscreteSampler::sample(Rng& rng) const {
  if (exact_) {
    const std::uint64_t x = rng.below(total_);
    for (std::size_t i = 0; i < cumulative_.size(); ++i)
      if (x < cumulative_[i]) return i;
    return cumulative_.size() - 1;
  }
  const double x = rng.uniform01() * cumulative_real_.back();
  for (std::size_t i = 0; i < cumulative_real_.size(); ++i)
    if (x < cumulative_real_[i]) return i;
  return cumulative_real_.size() - 1;
}

}  // namespace disco
