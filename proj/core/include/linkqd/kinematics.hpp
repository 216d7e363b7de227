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
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "linkqd/geometry.hpp"

namespace linkqd {

// Fixed node ids. Joints are appended from kFirstJointNode on.
inline constexpr std::size_t kMotorNode = 0;
inline constexpr std::size_t kFirstStaticNode = 1;
inline constexpr std::size_t kStaticNodeCount = 3;
inline constexpr std::size_t kCrankTipNode = 4;
inline constexpr std::size_t kFirstJointNode = 5;
inline constexpr std::size_t kCrankBeam = 0;

/// Tolerance (mm) for tangency and coincidence decisions.
inline constexpr double kGeometryTolerance = 1e-9;

enum class BeamEnd { A, B };

/// Which of the two circle intersections to take, relative to the directed
/// line from the first parent to the second.
enum class Branch { Left, Right };

struct Beam {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

/// Node rigidly welded to an existing beam: it keeps a fixed angle relative to
/// the parent beam's A->B direction and rotates with it.
struct ExtensionJoint {
  std::size_t parent_beam = 0;
  BeamEnd end = BeamEnd::A;
  double angle_offset = 0.0;
  std::size_t beam = 0;  // the beam this joint adds
};

/// Node hung from two existing nodes by two freely rotating beams.
struct TwoBeamJoint {
  std::size_t parent_a = 0;
  std::size_t parent_b = 0;
  Branch branch = Branch::Left;
  std::size_t beam_a = 0;
  std::size_t beam_b = 0;
};

using Joint = std::variant<ExtensionJoint, TwoBeamJoint>;

/// Decoded kinematic structure. The motor sits at the origin; node and beam
/// ids are assigned in construction order, so every joint only refers to
/// nodes and beams created before it.
class Linkage {
 public:
  Linkage(const std::array<Point, kStaticNodeCount>& static_nodes, double crank_length);

  /// Returns the id of the new node. Throws std::invalid_argument on a
  /// dangling parent reference or a non-positive length.
  std::size_t add_extension(std::size_t parent_beam, BeamEnd end, double angle_offset,
                            double length);
  std::size_t add_two_beam(std::size_t parent_a, std::size_t parent_b, Branch branch,
                           double length_a, double length_b);

  void set_beam_length(std::size_t beam, double length);

  [[nodiscard]] double crank_length() const { return beams_[kCrankBeam].length; }
  [[nodiscard]] const std::array<Point, kStaticNodeCount>& static_nodes() const {
    return static_nodes_;
  }
  [[nodiscard]] const std::vector<Joint>& joints() const { return joints_; }
  [[nodiscard]] const std::vector<Beam>& beams() const { return beams_; }
  [[nodiscard]] std::size_t node_count() const { return kFirstJointNode + joints_.size(); }

  /// True when the node's position depends on the crank angle.
  [[nodiscard]] bool is_moving(std::size_t node) const { return moving_.at(node) != 0; }
  [[nodiscard]] std::size_t moving_count() const;

  /// Nodes whose positions this node is computed from. Empty for the motor and
  /// static nodes; the crank tip depends on the motor.
  [[nodiscard]] std::vector<std::size_t> node_parents(std::size_t node) const;

  [[nodiscard]] double mean_beam_length() const;

 private:
  std::array<Point, kStaticNodeCount> static_nodes_;
  std::vector<Joint> joints_;
  std::vector<Beam> beams_;
  std::vector<char> moving_;
};

/// Result of rotating the crank one full turn in `steps` equal increments.
class PathTrace {
 public:
  PathTrace(std::size_t steps, std::size_t nodes);

  [[nodiscard]] std::size_t steps() const { return steps_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_; }

  /// nullopt when the node could not be placed at that step.
  [[nodiscard]] std::optional<Point> position(std::size_t step, std::size_t node) const;
  [[nodiscard]] bool feasible(std::size_t step) const { return feasible_[step] != 0; }
  [[nodiscard]] bool moving(std::size_t node) const { return moving_[node] != 0; }

  // Direct construction of a trace, e.g. from recorded or synthetic motion.
  void place(std::size_t step, std::size_t node, Point p);
  void set_feasible(std::size_t step, bool feasible) { feasible_.at(step) = feasible ? 1 : 0; }
  void set_moving(std::size_t node, bool moving) { moving_.at(node) = moving ? 1 : 0; }

  std::size_t foot_index = kCrankTipNode;
  /// Foot positions at feasible steps, in step order.
  std::vector<Point> foot_path;
  /// Crank step of each foot_path entry.
  std::vector<std::size_t> foot_steps;
  std::size_t error_count = 0;

 private:
  friend PathTrace solve(const Linkage& linkage, std::size_t steps);

  std::size_t steps_;
  std::size_t nodes_;
  std::vector<Point> positions_;  // steps x nodes
  std::vector<char> known_;
  std::vector<char> feasible_;
  std::vector<char> moving_;
};

/// Default angular resolution: 5 degree crank increments.
inline constexpr std::size_t kDefaultSteps = 72;

/// Rotates the crank through theta_k = 2*pi*k/steps and places every node.
/// A step at which any joint cannot be placed counts once towards
/// error_count and is left out of the foot path. The foot is the moving node
/// reaching the lowest y over the feasible steps (lowest id on ties).
/// Throws std::invalid_argument when steps < 3.
PathTrace solve(const Linkage& linkage, std::size_t steps = kDefaultSteps);

/// Intersection of circle (c1, r1) and circle (c2, r2) on the `branch` side of
/// the line c1 -> c2. Tangent circles yield the touching point for either
/// branch; coincident centres yield nullopt.
std::optional<Point> circle_intersection(Point c1, double r1, Point c2, double r2,
                                         Branch branch);

struct PathMetrics {
  double width = 0.0;
  double height = 0.0;
  double min_y = 0.0;
  bool valid = false;
};

PathMetrics path_metrics(std::span<const Point> path);
inline PathMetrics path_metrics(const PathTrace& trace) { return path_metrics(trace.foot_path); }

}  // namespace linkqd
