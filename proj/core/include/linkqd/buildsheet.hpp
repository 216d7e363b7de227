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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "linkqd/repertoire.hpp"

namespace linkqd {

/// LEGO Technic hole pitch, mm.
inline constexpr double kDefaultPitch = 8.0;

/// Nearest multiple of `pitch`, halves rounding up, never below one pitch.
/// Throws std::invalid_argument when pitch <= 0.
double snap_length(double length, double pitch);

struct BeamPart {
  std::size_t beam = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  double evolved = 0.0;
  double snapped = 0.0;
  std::size_t holes = 0;
};

struct BuildSheet {
  double pitch = kDefaultPitch;
  std::size_t steps = kDefaultSteps;
  FitnessKind fitness_kind = FitnessKind::Fp;
  std::array<Point, kStaticNodeCount> static_nodes{};
  std::vector<BeamPart> beams;
  double evolved_fitness = 0.0;
  std::size_t evolved_error_count = 0;
  double snapped_fitness = 0.0;
  std::size_t snapped_error_count = 0;

  /// The snapped linkage cannot be placed at any crank step.
  [[nodiscard]] bool snapped_fails() const { return snapped_error_count == steps; }
};

/// Snaps every beam of the decoded genome to the pitch and re-simulates both
/// versions under the run's fitness so the cost of snapping is visible.
BuildSheet build_sheet(const Genome& genome, const RunInfo& info, double pitch = kDefaultPitch);
/// Same for an already decoded (possibly hand-edited) linkage.
BuildSheet build_sheet(Linkage linkage, const RunInfo& info, double pitch = kDefaultPitch);

std::string format_build_sheet(const BuildSheet& sheet);
nlohmann::json to_json(const BuildSheet& sheet);

}  // namespace linkqd
