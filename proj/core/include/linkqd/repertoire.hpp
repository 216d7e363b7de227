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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linkqd/descriptors.hpp"
#include "linkqd/fitness.hpp"
#include "linkqd/genome.hpp"

namespace linkqd {

struct PathSummary {
  double width = 0.0;
  double height = 0.0;
  double lift = 0.0;
  double step_length = 0.0;
};

/// Everything learned from simulating one genome.
struct Evaluation {
  Genome genome;
  FitnessValue fitness;
  /// fitness.scalar oriented so that larger is better.
  double quality = 0.0;
  std::optional<Descriptor> descriptor;
  std::size_t error_count = 0;
  PathSummary summary;
  /// Normalised foot path fed to the autoencoder; only kept for MAP-AU runs.
  std::vector<double> path_vector;
};

/// Identity of the run that produced an archive.
struct RunInfo {
  std::string algorithm = "me";
  FitnessKind fitness = FitnessKind::Fp;
  std::optional<DescriptorSpace> space = DescriptorSpace::WH;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::size_t steps = kDefaultSteps;
  EncodingConfig encoding;
  TargetPointSet targets = default_target_points();
};

/// MAP-Elites grid: at most one elite per cell, each the best ever offered to
/// that cell. Cells are kept ordered by index.
struct Repertoire {
  GridSpec grid;
  std::map<std::size_t, Evaluation> cells;
  RunInfo info;

  [[nodiscard]] std::size_t size() const { return cells.size(); }
  [[nodiscard]] double coverage() const {
    return static_cast<double>(cells.size()) / static_cast<double>(grid.total_cells());
  }
};

/// Places `e` in the cell its descriptor bins to when the cell is empty or `e`
/// is strictly better; ties keep the incumbent. Throws std::invalid_argument
/// when `e` has no descriptor.
bool insert_elite(Repertoire& r, Evaluation e);

/// Sum over elites of max(0, quality + offset).
double qd_score(const Repertoire& r, double offset);

/// Default QD-score offset for a fitness: chosen so that any linkage with a
/// complete rotation contributes a non-negative term.
double default_qd_offset(FitnessKind kind, std::size_t steps);

}  // namespace linkqd
