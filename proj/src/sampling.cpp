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

#include "disco/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "disco/compiled.hpp"
#include "disco/error.hpp"
#include "disco/rng.hpp"

namespace disco {
namespace {

// Runs fn(chunk, begin, end) for every chunk of [0, n) and returns the
// per-chunk results in chunk order.
template <typename Result, typename Fn>
std::vector<Result> run_chunks(std::int64_t n, const SamplingOptions& options, Fn fn) {
  const std::int64_t chunk = std::max<std::int64_t>(1, options.chunk);
  const std::int64_t chunks = (n + chunk - 1) / chunk;
  std::vector<Result> results(static_cast<std::size_t>(chunks));
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::int64_t>(1, chunks))));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t c = next++; c < chunks; c = next++)
      results[static_cast<std::size_t>(c)] = fn(static_cast<std::uint64_t>(c), c * chunk,
                                                std::min(n, (c + 1) * chunk));
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

struct Moments {
  std::int64_t count = 0;
  double sum = 0;
  double sum_sq = 0;
};

Estimate finish(const std::vector<Moments>& parts, std::int64_t draws, std::uint64_t seed) {
  Moments total;
  for (const auto& m : parts) {
    total.count += m.count;
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  Estimate e;
  e.draws = draws;
  e.seed = seed;
  e.n = total.count;
  if (total.count == 0) return e;
  const double m = static_cast<double>(total.count);
  e.point = total.sum / m;
  if (total.count > 1) {
    const double var = std::max(0.0, (total.sum_sq - m * e.point * e.point) / (m - 1));
    e.std_error = std::sqrt(var / m);
  }
  return e;
}

class UnitDraw {
 public:
  UnitDraw(const UnitPopulation& pop, const std::optional<UnitRestriction>& restriction) {
    std::vector<Rational> weights;
    for (UnitId u = 1; u <= pop.count(); ++u) {
      if (restriction) {
        if (restriction->kind == UnitRestriction::Kind::Unit && restriction->unit != u) continue;
        if (restriction->kind == UnitRestriction::Kind::Group &&
            pop.group_name_of(u) != restriction->group)
          continue;
      }
      units_.push_back(u);
      weights.push_back(restriction && restriction->kind == UnitRestriction::Kind::Unit
                            ? Rational(1)
                            : pop.weight(u));
    }
    Rational total = 0;
    for (const auto& w : weights) total += w;
    if (units_.empty() || total == 0) throw ValidationError("restriction selects no units");
    for (auto& w : weights) w /= total;
    sampler_ = DiscreteSampler(weights);
  }
  UnitId operator()(Rng& rng) const { return units_[sampler_.sample(rng)]; }

 private:
  std::vector<UnitId> units_;
  DiscreteSampler sampler_;
};

class NoiseDraw {
 public:
  explicit NoiseDraw(const CompiledModel& cm) {
    for (std::size_t n = 0; n < cm.num_noises(); ++n) {
      std::vector<Rational> probs;
      std::vector<Value> values;
      for (const auto& e : cm.noise_pmf(n).entries()) {
        probs.push_back(e.prob);
        values.push_back(e.value);
      }
      samplers_.emplace_back(probs);
      values_.push_back(std::move(values));
    }
  }
  void operator()(Rng& rng, std::vector<Value>& out) const {
    for (std::size_t n = 0; n < samplers_.size(); ++n) out[n] = values_[n][samplers_[n].sample(rng)];
  }

 private:
  std::vector<DiscreteSampler> samplers_;
  std::vector<std::vector<Value>> values_;
};

bool satisfied(const Event& e, std::size_t slot, const std::vector<Value>& row) {
  return std::binary_search(e.values.begin(), e.values.end(), row[slot]);
}

}  // namespace

Dataset sample_dataset(const Model& model, std::int64_t n, std::uint64_t seed,
                       const SamplingOptions& options, std::string label) {
  if (n < 1) throw ValidationError("sample count must be at least 1");
  const CompiledModel cm(model);
  const UnitDraw draw_unit(model.population, std::nullopt);
  const NoiseDraw draw_noise(cm);
  auto chunks = run_chunks<std::vector<Record>>(
      n, options, [&](std::uint64_t c, std::int64_t begin, std::int64_t end) {
        Rng rng(seed, c);
        std::vector<Record> out;
        std::vector<Value> noise(cm.num_noises());
        for (std::int64_t i = begin; i < end; ++i) {
          Record rec;
          rec.unit = draw_unit(rng);
          draw_noise(rng, noise);
          rec.values.resize(cm.num_variables());
          cm.solve(rec.unit, noise, rec.values);
          out.push_back(std::move(rec));
        }
        return out;
      });
  Dataset data;
  for (const auto& v : model.variables) data.variables.push_back(v.name);
  for (auto& part : chunks)
    for (auto& rec : part) data.records.push_back(std::move(rec));
  data.provenance = {Provenance::Kind::Sampled, std::move(label), seed, n};
  return data;
}

Dataset exact_table_dataset(const std::string& scenario) {
  if (scenario != "paper200-table1" && scenario != "paper200")
    throw ValidationError("scenario " + scenario + " provides no exact table");
  Dataset data;
  data.variables = {"T", "Y"};
  UnitId unit = 1;
  auto add = [&](int count, int t, int y) {
    for (int i = 0; i < count; ++i) data.records.push_back({unit++, {Value(t), Value(y)}});
  };
  // Group S (units 1..100) always takes T=-1.
  add(20, -1, -1);
  add(80, -1, -2);
  // Group S' (units 101..200).
  add(25, -1, 0);
  add(25, -1, -1);
  add(25, 1, 1);
  add(25, 1, 2);
  data.provenance = {Provenance::Kind::Exact, "paper200-table1", std::nullopt, 200};
  return data;
}

Estimate mc_valuation(const Model& model, const Query& query, std::int64_t n,
                      std::uint64_t seed, const SamplingOptions& options) {
  if (n < 1) throw ValidationError("sample count must be at least 1");
  if (auto report = validate_query(query, model); !report.ok())
    throw ValidationError(report.summary());
  const CompiledModel base(model);
  const std::vector<WorldRef> cf = query.counterfactual_worlds();
  std::vector<std::unique_ptr<CompiledModel>> worlds;
  for (const auto& w : cf)
    worlds.push_back(std::make_unique<CompiledModel>(
        apply_do(model.with_coupling(Coupling::Scm), w.intervention())));
  auto world_pos = [&](const WorldRef& w) -> std::size_t {
    if (w.is_factual()) return 0;
    return 1 + static_cast<std::size_t>(std::find(cf.begin(), cf.end(), w) - cf.begin());
  };
  const std::size_t nv = base.num_variables();
  auto slot = [&](const std::string& var, const WorldRef& w) {
    return world_pos(w) * nv + base.variable_index(var);
  };
  std::vector<std::pair<std::size_t, const Event*>> evidence, targets;
  for (const auto& e : query.evidence) evidence.emplace_back(slot(e.variable, e.world), &e);
  for (const auto& e : query.targets) targets.emplace_back(slot(e.variable, e.world), &e);
  const bool probability = query.kind == Query::Kind::Probability;
  const std::size_t value_slot =
      probability ? 0 : slot(query.expectation_variable, query.expectation_world);
  const bool fresh = model.coupling == Coupling::Disco;
  const UnitDraw draw_unit(model.population, query.restriction);
  const NoiseDraw draw_noise(base);

  auto parts = run_chunks<Moments>(n, options, [&](std::uint64_t c, std::int64_t begin,
                                                   std::int64_t end) {
    Rng rng(seed, c);
    Moments m;
    std::vector<Value> noise(base.num_noises());
    std::vector<Value> row(nv * (1 + cf.size()));
    for (std::int64_t i = begin; i < end; ++i) {
      const UnitId u = draw_unit(rng);
      draw_noise(rng, noise);
      base.solve(u, noise, std::span<Value>(row).first(nv));
      bool ok = true;
      for (const auto& [s, e] : evidence) ok = ok && satisfied(*e, s, row);
      if (!ok) continue;
      for (std::size_t k = 0; k < worlds.size(); ++k) {
        if (fresh) draw_noise(rng, noise);
        worlds[k]->solve(u, noise, std::span<Value>(row).subspan((k + 1) * nv, nv));
      }
      double x;
      if (probability) {
        bool hit = true;
        for (const auto& [s, e] : targets) hit = hit && satisfied(*e, s, row);
        x = hit ? 1.0 : 0.0;
      } else {
        x = row[value_slot].to_double();
      }
      ++m.count;
      m.sum += x;
      m.sum_sq += x * x;
    }
    return m;
  });
  Estimate e = finish(parts, n, seed);
  if (e.n == 0)
    throw NullEventError("no draw satisfied the evidence in " + std::to_string(n) +
                         " draws; use the exact engine for rare evidence");
  return e;
}

LinearGaussianModel linear_gaussian_default() {
  return LinearGaussianModel{{-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}};
}

Estimate mc_linear_gaussian(const LinearGaussianModel& model, const Query& query,
                            std::int64_t n, std::uint64_t seed, const SamplingOptions& options) {
  if (n < 1) throw ValidationError("sample count must be at least 1");
  if (query.kind != Query::Kind::Expectation)
    throw ValidationError("linear-gaussian supports expectation queries only");
  if (!query.evidence.empty())
    throw ValidationError("linear-gaussian does not support evidence");
  const std::string& var = query.expectation_variable;
  if (var != "X" && var != "Y") throw ValidationError("undeclared variable " + var);
  std::optional<double> fix_x, fix_y;
  if (!query.expectation_world.is_factual())
    for (const auto& [name, value] : query.expectation_world.intervention()) {
      if (name == "X") fix_x = value.to_double();
      else if (name == "Y") fix_y = value.to_double();
      else throw ValidationError("intervention on undeclared variable " + name);
    }
  const auto count = static_cast<std::int64_t>(model.unit_values.size());
  std::int64_t only = 0;
  if (query.restriction) {
    if (query.restriction->kind != UnitRestriction::Kind::Unit)
      throw ValidationError("linear-gaussian has no groups");
    only = query.restriction->unit;
    if (only < 1 || only > count) throw ValidationError("unit outside population");
  }
  auto parts = run_chunks<Moments>(n, options, [&](std::uint64_t c, std::int64_t begin,
                                                   std::int64_t end) {
    Rng rng(seed, c);
    Moments m;
    for (std::int64_t i = begin; i < end; ++i) {
      const std::int64_t unit =
          only ? only : 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(count)));
      const double u = model.unit_values[static_cast<std::size_t>(unit - 1)];
      const double e1 = rng.normal();
      const double e2 = rng.normal();
      const double x = fix_x ? *fix_x : u + e1;
      const double y = fix_y ? *fix_y : x + u + e2;
      const double v = var == "X" ? x : y;
      ++m.count;
      m.sum += v;
      m.sum_sq += v * v;
    }
    return m;
  });
  return finish(parts, n, seed);
}

}  // namespace disco
