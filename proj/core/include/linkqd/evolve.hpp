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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "linkqd/aurora.hpp"
#include "linkqd/descriptors.hpp"
#include "linkqd/fitness.hpp"
#include "linkqd/genome.hpp"
#include "linkqd/nsga2.hpp"
#include "linkqd/repertoire.hpp"

namespace linkqd {

enum class Algorithm { EA, NSGA2, MapElites };

std::string_view to_string(Algorithm a);
/// Accepts "ea" / "nsga2" / "me"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);

/// Which individuals the EA's tournaments draw from.
enum class SurvivorPool { ParentsAndChildren, ChildrenOnly };

struct RunConfig {
  Algorithm algorithm = Algorithm::MapElites;
  FitnessKind fitness = FitnessKind::Fp;
  DescriptorSpace space = DescriptorSpace::WH;
  /// Population size, and children created per iteration.
  std::size_t batch_size = 5000;
  /// Total evaluations, initial population included.
  std::size_t budget = 50000;
  std::uint64_t seed = 0;
  std::size_t steps = kDefaultSteps;
  std::size_t tournament_size = 3;
  SurvivorPool survivor_pool = SurvivorPool::ParentsAndChildren;
  EncodingConfig encoding;
  TargetPointSet targets = default_target_points();
  /// Overrides default_grid(space, encoding) for the hand-crafted spaces.
  std::optional<GridSpec> grid;
  AuroraConfig aurora;
  std::optional<double> qd_offset;
  /// Reference point (oriented objectives) for NSGA-II front hypervolume.
  std::optional<Objectives> hv_reference;
  /// 0 = resolve_workers() default.
  std::size_t workers = 0;

  /// Iterations after the initial batch: budget / batch_size - 1, at least 0.
  [[nodiscard]] std::size_t iterations() const;
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

struct IterationMetrics {
  std::size_t iteration = 0;
  std::size_t evaluations = 0;
  /// Raw fitness of the best individual evaluated so far.
  double best_fitness = 0.0;
  double coverage = 0.0;
  double qd_score = 0.0;
  std::size_t front_size = 0;
  double hypervolume = 0.0;
};

struct RunObserver {
  std::function<void(const IterationMetrics&)> on_metrics;
  std::function<void(std::size_t, std::span<const Evaluation>)> on_population;
  std::function<void(std::size_t, const Repertoire&)> on_archive;
};

/// Settings shared by every evaluation in a run.
struct EvalContext {
  EncodingConfig encoding;
  FitnessKind fitness = FitnessKind::Fp;
  std::size_t steps = kDefaultSteps;
  TargetPointSet targets = default_target_points();
  /// Descriptor space, or nullopt outside MAP-Elites.
  std::optional<DescriptorSpace> space;
  /// Frozen encoder for MAP-AU; without it AU evaluations carry only their
  /// path vector.
  const Autoencoder* autoencoder = nullptr;
};

EvalContext make_context(const RunConfig& cfg);
Evaluation evaluate(const Genome& genome, const EvalContext& ctx);
/// Same, for a linkage already solved (e.g. after beam-length edits).
Evaluation evaluate(const Genome& genome, const Linkage& linkage, const PathTrace& trace,
                    const EvalContext& ctx);

struct PopulationResult {
  std::vector<Evaluation> population;
  std::vector<IterationMetrics> log;
  RunInfo info;
};

struct MapElitesResult {
  Repertoire archive;
  std::vector<IterationMetrics> log;
  std::optional<Autoencoder> autoencoder;
};

/// (mu + lambda) EA: every member produces one child, survivors come from
/// size-3 tournaments with replacement over parents and children.
PopulationResult run_ea(const RunConfig& cfg, const RunObserver& observer = {});

/// Every member produces one child; survivors are the best of parents and
/// children by front rank, then crowding distance.
PopulationResult run_nsga2(const RunConfig& cfg, const RunObserver& observer = {});

/// Parents drawn uniformly with replacement from the archive; children are
/// inserted in child order after parallel evaluation.
MapElitesResult run_map_elites(const RunConfig& cfg, const RunObserver& observer = {});

/// Index of the tournament winner among `entrants` (indices into `quality`);
/// ties go to the smaller index.
std::size_t tournament_winner(std::span<const double> quality,
                              std::span<const std::size_t> entrants);

}  // namespace linkqd
