// Copyright 2026 The linkqd Authors.
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

#include "linkqd/evolve.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "linkqd/parallel.hpp"
#include "linkqd/rng.hpp"

namespace linkqd {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::EA: return "ea";
    case Algorithm::NSGA2: return "nsga2";
    case Algorithm::MapElites: return "me";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "ea") return Algorithm::EA;
  if (name == "nsga2") return Algorithm::NSGA2;
  if (name == "me") return Algorithm::MapElites;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected ea|nsga2|me)");
}

std::size_t RunConfig::iterations() const {
  if (batch_size == 0 || budget < batch_size) return 0;
  return budget / batch_size - 1;
}

void RunConfig::validate() const {
  encoding.validate();
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (steps < 3) throw std::invalid_argument("steps must be at least 3");
  if (tournament_size == 0) throw std::invalid_argument("tournament size must be positive");
  if (targets.step_points.empty() || targets.lift_points.empty()) {
    throw std::invalid_argument("target point sets must be non-empty");
  }
  if (grid) {
    grid->validate();
    if (grid->axes.size() != dimensions(space)) {
      throw std::invalid_argument("grid dimensionality does not match the descriptor space");
    }
  }
}

EvalContext make_context(const RunConfig& cfg) {
  EvalContext ctx;
  ctx.encoding = cfg.encoding;
  ctx.fitness = cfg.fitness;
  ctx.steps = cfg.steps;
  ctx.targets = cfg.targets;
  if (cfg.algorithm == Algorithm::MapElites) ctx.space = cfg.space;
  return ctx;
}

Evaluation evaluate(const Genome& genome, const EvalContext& ctx) {
  const Linkage linkage = decode(genome, ctx.encoding);
  return evaluate(genome, linkage, solve(linkage, ctx.steps), ctx);
}

Evaluation evaluate(const Genome& genome, const Linkage& linkage, const PathTrace& trace,
                    const EvalContext& ctx) {
  Evaluation e;
  e.genome = genome;
  e.fitness = evaluate_fitness(ctx.fitness, trace, ctx.targets);
  e.quality = quality(ctx.fitness, e.fitness.scalar);
  e.error_count = trace.error_count;
  const PathMetrics m = path_metrics(trace);
  const StepLift sl = step_and_lift(trace.foot_path, trace.error_count == 0);
  e.summary = {m.width, m.height, sl.lift, sl.step_length};

  if (!ctx.space) return e;
  switch (*ctx.space) {
    case DescriptorSpace::WH:
      e.descriptor = descriptor_wh(trace);
      break;
    case DescriptorSpace::LIS:
      e.descriptor = descriptor_lis(linkage, trace);
      break;
    case DescriptorSpace::ST:
      e.descriptor = descriptor_st(linkage, trace.foot_index);
      break;
    case DescriptorSpace::AU:
      if (auto v = path_to_vector(trace)) {
        e.path_vector = std::move(*v);
        if (ctx.autoencoder) {
          const Latent z = ctx.autoencoder->encode(e.path_vector);
          e.descriptor = Descriptor{{z.begin(), z.end()}, DescriptorSpace::AU};
        }
      }
      break;
  }
  return e;
}

std::size_t tournament_winner(std::span<const double> quality,
                              std::span<const std::size_t> entrants) {
  std::size_t best = entrants.front();
  for (std::size_t i : entrants.subspan(1)) {
    if (quality[i] > quality[best] || (quality[i] == quality[best] && i < best)) best = i;
  }
  return best;
}

namespace {

RunInfo make_info(const RunConfig& cfg) {
  RunInfo info;
  info.algorithm = std::string(to_string(cfg.algorithm));
  info.fitness = cfg.fitness;
  info.space = cfg.algorithm == Algorithm::MapElites ? std::optional(cfg.space) : std::nullopt;
  info.seed = cfg.seed;
  info.steps = cfg.steps;
  info.encoding = cfg.encoding;
  info.targets = cfg.targets;
  return info;
}

std::vector<Evaluation> initial_batch(const RunConfig& cfg, const EvalContext& ctx,
                                      std::size_t workers) {
  std::vector<Evaluation> out(cfg.batch_size);
  parallel_for(cfg.batch_size, workers, [&](std::size_t i) {
    Rng rng = substream(cfg.seed, stream::kInit, 0, i);
    out[i] = evaluate(random_genome(rng, cfg.encoding), ctx);
  });
  return out;
}

std::vector<Evaluation> offspring(const RunConfig& cfg, const EvalContext& ctx,
                                  std::size_t workers, std::size_t iteration,
                                  const std::vector<const Genome*>& parents) {
  std::vector<Evaluation> out(parents.size());
  parallel_for(parents.size(), workers, [&](std::size_t i) {
    Rng rng = substream(cfg.seed, stream::kMutate, iteration, i);
    out[i] = evaluate(mutate(*parents[i], rng), ctx);
  });
  return out;
}

/// Running best over everything evaluated, oriented by quality.
struct BestTracker {
  double quality = -std::numeric_limits<double>::infinity();
  double raw = 0.0;

  void offer(std::span<const Evaluation> batch) {
    for (const Evaluation& e : batch) {
      if (e.quality > quality) {
        quality = e.quality;
        raw = e.fitness.scalar;
      }
    }
  }
};

Objectives default_reference(const RunConfig& cfg) {
  if (cfg.hv_reference) return *cfg.hv_reference;
  const double r = cfg.fitness == FitnessKind::Fp ? -5000.0 : -2.0 * static_cast<double>(cfg.steps);
  return {r, r};
}

void emit(const RunObserver& observer, std::vector<IterationMetrics>& log,
          const IterationMetrics& m) {
  log.push_back(m);
  if (observer.on_metrics) observer.on_metrics(m);
}

}  // namespace

PopulationResult run_ea(const RunConfig& cfg, const RunObserver& observer) {
  cfg.validate();
  const EvalContext ctx = [&] {
    EvalContext c = make_context(cfg);
    c.space.reset();
    return c;
  }();
  const std::size_t workers = resolve_workers(cfg.workers);
  const std::size_t n = cfg.batch_size;

  PopulationResult result;
  result.info = make_info(cfg);
  result.info.algorithm = "ea";
  result.info.space.reset();
  result.population = initial_batch(cfg, ctx, workers);
  BestTracker best;
  best.offer(result.population);
  emit(observer, result.log, {0, n, best.raw});
  if (observer.on_population) observer.on_population(0, result.population);

  const std::size_t iterations = cfg.iterations();
  for (std::size_t t = 1; t <= iterations; ++t) {
    std::vector<const Genome*> parents;
    parents.reserve(n);
    for (const Evaluation& e : result.population) parents.push_back(&e.genome);
    std::vector<Evaluation> children = offspring(cfg, ctx, workers, t, parents);
    best.offer(children);

    std::vector<Evaluation> pool;
    if (cfg.survivor_pool == SurvivorPool::ParentsAndChildren) {
      pool = std::move(result.population);
      pool.insert(pool.end(), std::make_move_iterator(children.begin()),
                  std::make_move_iterator(children.end()));
    } else {
      pool = std::move(children);
    }
    std::vector<double> q(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) q[i] = pool[i].quality;

    Rng rng = substream(cfg.seed, stream::kSelect, t);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::vector<std::size_t> entrants(cfg.tournament_size);
    std::vector<Evaluation> survivors;
    survivors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& e : entrants) e = pick(rng);
      survivors.push_back(pool[tournament_winner(q, entrants)]);
    }
    result.population = std::move(survivors);
    emit(observer, result.log, {t, n * (t + 1), best.raw});
    if (observer.on_population) observer.on_population(t, result.population);
  }
  result.info.iterations = iterations;
  result.info.evaluations = n * (iterations + 1);
  return result;
}

PopulationResult run_nsga2(const RunConfig& cfg, const RunObserver& observer) {
  cfg.validate();
  EvalContext ctx = make_context(cfg);
  ctx.space.reset();
  const std::size_t workers = resolve_workers(cfg.workers);
  const std::size_t n = cfg.batch_size;
  const Objectives reference = default_reference(cfg);

  auto objectives_of = [&](std::span<const Evaluation> pop) {
    std::vector<Objectives> obj(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) obj[i] = oriented(cfg.fitness, pop[i].fitness.objectives);
    return obj;
  };
  auto front_metrics = [&](std::span<const Evaluation> pop, IterationMetrics& m) {
    const auto obj = objectives_of(pop);
    const auto fronts = nondominated_sort(obj);
    std::vector<Objectives> first;
    for (std::size_t i : fronts.front()) first.push_back(obj[i]);
    m.front_size = first.size();
    m.hypervolume = hypervolume(first, reference);
  };

  PopulationResult result;
  result.info = make_info(cfg);
  result.info.algorithm = "nsga2";
  result.info.space.reset();
  result.population = initial_batch(cfg, ctx, workers);
  BestTracker best;
  best.offer(result.population);
  IterationMetrics m0{0, n, best.raw};
  front_metrics(result.population, m0);
  emit(observer, result.log, m0);
  if (observer.on_population) observer.on_population(0, result.population);

  const std::size_t iterations = cfg.iterations();
  for (std::size_t t = 1; t <= iterations; ++t) {
    std::vector<const Genome*> parents;
    parents.reserve(n);
    for (const Evaluation& e : result.population) parents.push_back(&e.genome);
    std::vector<Evaluation> children = offspring(cfg, ctx, workers, t, parents);
    best.offer(children);

    std::vector<Evaluation> pool = std::move(result.population);
    pool.insert(pool.end(), std::make_move_iterator(children.begin()),
                std::make_move_iterator(children.end()));
    const std::vector<std::size_t> keep = nsga2_select(objectives_of(pool), n);
    std::vector<Evaluation> survivors;
    survivors.reserve(n);
    for (std::size_t i : keep) survivors.push_back(std::move(pool[i]));
    result.population = std::move(survivors);

    IterationMetrics m{t, n * (t + 1), best.raw};
    front_metrics(result.population, m);
    emit(observer, result.log, m);
    if (observer.on_population) observer.on_population(t, result.population);
  }
  result.info.iterations = iterations;
  result.info.evaluations = n * (iterations + 1);
  return result;
}

MapElitesResult run_map_elites(const RunConfig& cfg, const RunObserver& observer) {
  cfg.validate();
  EvalContext ctx = make_context(cfg);
  const std::size_t workers = resolve_workers(cfg.workers);
  const std::size_t n = cfg.batch_size;
  const bool learned = cfg.space == DescriptorSpace::AU;
  const double offset = cfg.qd_offset.value_or(default_qd_offset(cfg.fitness, cfg.steps));

  MapElitesResult result;
  Repertoire& archive = result.archive;
  archive.grid = cfg.grid && !learned ? *cfg.grid : default_grid(cfg.space, cfg.encoding);
  archive.info = make_info(cfg);

  std::vector<Evaluation> batch = initial_batch(cfg, ctx, workers);
  BestTracker best;
  best.offer(batch);

  if (learned) {
    result.autoencoder.emplace(cfg.seed);
    std::vector<PathVector> bootstrap;
    for (const Evaluation& e : batch) {
      if (!e.path_vector.empty()) bootstrap.push_back(e.path_vector);
    }
    Rng rng = substream(cfg.seed, stream::kAurora, 0);
    aurora_schedule(archive, *result.autoencoder, 0, cfg.aurora, bootstrap, rng);
    ctx.autoencoder = &*result.autoencoder;
    for (Evaluation& e : batch) {
      if (e.path_vector.empty()) continue;
      const Latent z = ctx.autoencoder->encode(e.path_vector);
      e.descriptor = Descriptor{{z.begin(), z.end()}, DescriptorSpace::AU};
    }
  }
  for (Evaluation& e : batch) {
    if (e.descriptor) insert_elite(archive, std::move(e));
  }
  emit(observer, result.log, {0, n, best.raw, archive.coverage(), qd_score(archive, offset)});
  if (observer.on_archive) observer.on_archive(0, archive);

  const std::size_t iterations = cfg.iterations();
  for (std::size_t t = 1; t <= iterations; ++t) {
    std::vector<const Genome*> parents(n, nullptr);
    std::vector<Genome> fresh;
    if (archive.cells.empty()) {
      // Nothing archived yet: restart from random genomes.
      fresh.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        Rng rng = substream(cfg.seed, stream::kInit, t, i);
        fresh.push_back(random_genome(rng, cfg.encoding));
      }
      for (std::size_t i = 0; i < n; ++i) parents[i] = &fresh[i];
    } else {
      std::vector<const Genome*> elites;
      elites.reserve(archive.cells.size());
      for (const auto& [cell, e] : archive.cells) elites.push_back(&e.genome);
      Rng rng = substream(cfg.seed, stream::kSelect, t);
      std::uniform_int_distribution<std::size_t> pick(0, elites.size() - 1);
      for (auto& p : parents) p = elites[pick(rng)];
    }
    std::vector<Evaluation> children = offspring(cfg, ctx, workers, t, parents);
    best.offer(children);
    for (Evaluation& e : children) {
      if (e.descriptor) insert_elite(archive, std::move(e));
    }
    if (learned) {
      Rng rng = substream(cfg.seed, stream::kAurora, t);
      aurora_schedule(archive, *result.autoencoder, t, cfg.aurora, {}, rng);
    }
    emit(observer, result.log,
         {t, n * (t + 1), best.raw, archive.coverage(), qd_score(archive, offset)});
    if (observer.on_archive) observer.on_archive(t, archive);
  }
  archive.info.iterations = iterations;
  archive.info.evaluations = n * (iterations + 1);
  return result;
}

}  // namespace linkqd
