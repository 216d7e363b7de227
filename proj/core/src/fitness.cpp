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

#include "linkqd/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace linkqd {

TargetPointSet default_target_points(const TargetShape& shape) {
  TargetPointSet set;
  const double half = shape.width / 2.0;
  for (std::size_t i = 0; i < shape.step_count; ++i) {
    const double t = shape.step_count == 1
                         ? 0.5
                         : static_cast<double>(i) / static_cast<double>(shape.step_count - 1);
    set.step_points.push_back(shape.origin + Point{t * shape.width, 0.0});
  }
  for (std::size_t j = 0; j < shape.lift_count; ++j) {
    const double a = std::numbers::pi * static_cast<double>(j + 1) /
                     static_cast<double>(shape.lift_count + 1);
    set.lift_points.push_back(shape.origin +
                              Point{half + half * std::cos(a), shape.height * std::sin(a)});
  }
  return set;
}

TargetPointSet read_target_points(std::istream& in) {
  TargetPointSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    Point p;
    std::string label;
    if (!(row >> p.x >> p.y >> label)) {
      throw std::runtime_error("target points line " + std::to_string(lineno) +
                               ": expected `x y label`");
    }
    if (label == "step") {
      set.step_points.push_back(p);
    } else if (label == "lift") {
      set.lift_points.push_back(p);
    } else {
      throw std::runtime_error("target points line " + std::to_string(lineno) +
                               ": unknown label '" + label + "'");
    }
  }
  if (set.step_points.empty() || set.lift_points.empty()) {
    throw std::runtime_error("target points need at least one step and one lift point");
  }
  return set;
}

double nearest_distance(Point p, std::span<const Point> path) {
  if (path.empty()) return kEmptyPathDistance;
  double best = std::numeric_limits<double>::infinity();
  for (const Point& q : path) {
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    best = std::min(best, dx * dx + dy * dy);
  }
  return std::sqrt(best);
}

namespace {

double distance_sum(std::span<const Point> targets, std::span<const Point> path) {
  double sum = 0.0;
  for (const Point& t : targets) sum += nearest_distance(t, path);
  return sum;
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double fitness_fp(const PathTrace& trace, const TargetPointSet& targets) {
  const auto err = static_cast<double>(trace.error_count);
  return -(distance_sum(targets.step_points, trace.foot_path) +
           distance_sum(targets.lift_points, trace.foot_path)) -
         err;
}

std::array<double, 2> fitness_fp_mo(const PathTrace& trace, const TargetPointSet& targets) {
  const auto err = static_cast<double>(trace.error_count);
  return {-distance_sum(targets.step_points, trace.foot_path) - err,
          -distance_sum(targets.lift_points, trace.foot_path) - err};
}

StepLift step_and_lift(std::span<const Point> path, bool closed) {
  const std::size_t n = path.size();
  if (n < 2) return {};

  // Direction of x-motion per vertex by central difference over step order.
  std::vector<int> dir(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t prev = i == 0 ? (closed ? n - 1 : 0) : i - 1;
    std::size_t next = i + 1 == n ? (closed ? 0 : n - 1) : i + 1;
    dir[i] = sign(path[next].x - path[prev].x);
  }

  std::size_t bottom = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (path[i].y < path[bottom].y) bottom = i;
  }
  const double y_b = path[bottom].y;
  const int sign_b = dir[bottom];
  if (sign_b == 0) return {};

  StepLift out;
  auto qualifies = [&](std::size_t i) {
    return path[i].y <= y_b + kStepBand && dir[i] == sign_b;
  };
  const std::size_t segments = closed ? n : n - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const std::size_t j = (i + 1) % n;
    if (qualifies(i) && qualifies(j)) out.step_length += distance(path[i], path[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dir[i] == -sign_b) out.lift = std::max(out.lift, path[i].y - y_b);
  }
  return out;
}

double step_length(const PathTrace& trace) {
  return step_and_lift(trace.foot_path, trace.error_count == 0).step_length;
}

double lift(const PathTrace& trace) {
  return step_and_lift(trace.foot_path, trace.error_count == 0).lift;
}

std::size_t angle_error(const PathTrace& trace) {
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    if (!trace.feasible(k)) continue;
    const double foot_y = trace.position(k, trace.foot_index)->y;
    for (std::size_t n = 0; n < trace.node_count(); ++n) {
      if (n == trace.foot_index || !trace.moving(n)) continue;
      if (trace.position(k, n)->y < foot_y) {
        ++count;
        break;
      }
    }
  }
  return count;
}

double fitness_fsl(const PathTrace& trace) {
  const StepLift sl = step_and_lift(trace.foot_path, trace.error_count == 0);
  return -kStepWeight * sl.step_length - kLiftWeight * sl.lift +
         static_cast<double>(angle_error(trace)) + static_cast<double>(trace.error_count);
}

std::array<double, 2> fitness_fsl_mo(const PathTrace& trace) {
  const StepLift sl = step_and_lift(trace.foot_path, trace.error_count == 0);
  const double penalty =
      static_cast<double>(angle_error(trace)) + static_cast<double>(trace.error_count);
  return {-sl.step_length + penalty, -sl.lift + penalty};
}

std::string_view to_string(FitnessKind kind) {
  return kind == FitnessKind::Fp ? "fp" : "fsl";
}

FitnessKind parse_fitness_kind(std::string_view name) {
  if (name == "fp") return FitnessKind::Fp;
  if (name == "fsl") return FitnessKind::Fsl;
  throw std::invalid_argument("unknown fitness '" + std::string(name) + "' (expected fp|fsl)");
}

FitnessValue evaluate_fitness(FitnessKind kind, const PathTrace& trace,
                              const TargetPointSet& targets) {
  if (kind == FitnessKind::Fp) {
    return {fitness_fp(trace, targets), fitness_fp_mo(trace, targets)};
  }
  return {fitness_fsl(trace), fitness_fsl_mo(trace)};
}

}  // namespace linkqd
