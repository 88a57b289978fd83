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

#include <cstdint>
#include <random>
#include <vector>

#include "disco/rational.hpp"

namespace disco {

// Seeded generator with a splittable stream scheme.
//
// Raw bits come from std::mt19937_64 (its output sequence is fixed by the
// C++ standard); the engine for (seed, stream) is keyed through
// std::seed_seq, which is likewise fully specified. Integer, real and normal
// variates are derived here rather than through <random> distributions,
// whose algorithms vary between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next() { return gen_(); }
  // Uniform on [0, n); n > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t n);
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Standard normal (Box-Muller, one variate per call).
  double normal();

 private:
  std::mt19937_64 gen_;
};

// Draws an index with probability probs[i]. Exact when the common
// denominator fits in 62 bits, otherwise through doubles.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(const std::vector<Rational>& probs);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  bool exact_ = true;
  std::uint64_t total_ = 0;
  std::vector<std::uint64_t> cumulative_;
  std::vector<double> cumulative_real_;
};

}  // namespace disco
