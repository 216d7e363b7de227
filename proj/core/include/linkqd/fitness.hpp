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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "linkqd/geometry.hpp"
#include "linkqd/kinematics.hpp"

namespace linkqd {

/// Target points for the point-distance fitness, split into the flat step
/// line and the lift points above it.
struct TargetPointSet {
  std::vector<Point> step_points;
  std::vector<Point> lift_points;

  [[nodiscard]] std::size_t size() const { return step_points.size() + lift_points.size(); }
  friend bool operator==(const TargetPointSet&, const TargetPointSet&) = default;
};

/// Lying-D target: `step_count` points evenly spaced over [0, width] at y = 0
/// and `lift_count` points on a half-ellipse of the same width rising `height`
/// above it (arc end points excluded), all shifted by `origin`.
struct TargetShape {
  std::size_t step_count = 10;
  std::size_t lift_count = 5;
  double width = 60.0;
  double height = 20.0;
  Point origin{};
};

TargetPointSet default_target_points(const TargetShape& shape = {});

/// Reads whitespace separated `x y label` rows, label being `step` or `lift`.
/// Blank lines and lines starting with '#' are skipped. Throws
/// std::runtime_error on malformed rows or when either set ends up empty.
TargetPointSet read_target_points(std::istream& in);

/// Distance charged per target point when the foot path is empty.
inline constexpr double kEmptyPathDistance = 1e6;
/// Height of the band above the lowest path point that counts as ground contact.
inline constexpr double kStepBand = 5.0;
inline constexpr double kStepWeight = 0.8;
inline constexpr double kLiftWeight = 0.2;

/// Distance from `p` to the closest vertex of `path`; kEmptyPathDistance when
/// the path is empty.
double nearest_distance(Point p, std::span<const Point> path);

/// -sum of nearest distances over both target sets minus error_count.
double fitness_fp(const PathTrace& trace, const TargetPointSet& targets);
/// (step objective, lift objective); each carries the error penalty.
std::array<double, 2> fitness_fp_mo(const PathTrace& trace, const TargetPointSet& targets);

struct StepLift {
  double step_length = 0.0;
  double lift = 0.0;
};

/// Step length and lift of a foot path given in step order. `closed` adds the
/// wrap-around segment and wrap-around differences (a full error-free turn).
StepLift step_and_lift(std::span<const Point> path, bool closed);

double step_length(const PathTrace& trace);
double lift(const PathTrace& trace);

/// Feasible steps at which another moving node is strictly below the foot.
std::size_t angle_error(const PathTrace& trace);

/// -0.8*step - 0.2*lift + angle error + error_count. Lower is better.
double fitness_fsl(const PathTrace& trace);
/// (-step + angle error + error_count, -lift + angle error + error_count).
std::array<double, 2> fitness_fsl_mo(const PathTrace& trace);

enum class FitnessKind { Fp, Fsl };

std::string_view to_string(FitnessKind kind);
/// Accepts "fp" / "fsl"; throws std::invalid_argument otherwise.
FitnessKind parse_fitness_kind(std::string_view name);

/// Raw fitness values as the formulas define them.
struct FitnessValue {
  double scalar = 0.0;
  std::array<double, 2> objectives{};
};

FitnessValue evaluate_fitness(FitnessKind kind, const PathTrace& trace,
                              const TargetPointSet& targets);

/// Orients a raw value so that larger is always better. F_p is already a
/// reward; F_sl is a cost.
constexpr double quality(FitnessKind kind, double raw) {
  return kind == FitnessKind::Fp ? raw : -raw;
}
constexpr std::array<double, 2> oriented(FitnessKind kind, std::array<double, 2> raw) {
  return {quality(kind, raw[0]), quality(kind, raw[1])};
}

}  // namespace linkqd
