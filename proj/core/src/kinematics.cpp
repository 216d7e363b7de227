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

#include "linkqd/kinematics.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace linkqd {

Linkage::Linkage(const std::array<Point, kStaticNodeCount>& static_nodes,
                 double crank_length)
    : static_nodes_(static_nodes) {
  if (!(crank_length > 0.0)) {
    throw std::invalid_argument("crank length must be positive");
  }
  beams_.push_back({kMotorNode, kCrankTipNode, crank_length});
  moving_.assign(kFirstJointNode, 0);
  moving_[kCrankTipNode] = 1;
}

std::size_t Linkage::add_extension(std::size_t parent_beam, BeamEnd end, double angle_offset,
                                   double length) {
  if (parent_beam >= beams_.size()) {
    throw std::invalid_argument("extension joint references beam " +
                                std::to_string(parent_beam) + " which does not exist yet");
  }
  if (!(length > 0.0)) throw std::invalid_argument("beam length must be positive");
  const Beam& parent = beams_[parent_beam];
  const std::size_t node = node_count();
  const std::size_t anchor = end == BeamEnd::A ? parent.a : parent.b;
  const bool moves = moving_[parent.a] || moving_[parent.b];
  const std::size_t beam = beams_.size();
  beams_.push_back({anchor, node, length});
  joints_.emplace_back(ExtensionJoint{parent_beam, end, angle_offset, beam});
  moving_.push_back(moves ? 1 : 0);
  return node;
}

std::size_t Linkage::add_two_beam(std::size_t parent_a, std::size_t parent_b, Branch branch,
                                  double length_a, double length_b) {
  const std::size_t node = node_count();
  if (parent_a >= node || parent_b >= node) {
    throw std::invalid_argument("two-beam joint references a node that does not exist yet");
  }
  if (parent_a == parent_b) throw std::invalid_argument("two-beam joint needs distinct parents");
  if (!(length_a > 0.0) || !(length_b > 0.0)) {
    throw std::invalid_argument("beam length must be positive");
  }
  const std::size_t beam_a = beams_.size();
  beams_.push_back({parent_a, node, length_a});
  beams_.push_back({parent_b, node, length_b});
  joints_.emplace_back(TwoBeamJoint{parent_a, parent_b, branch, beam_a, beam_a + 1});
  moving_.push_back(moving_[parent_a] || moving_[parent_b] ? 1 : 0);
  return node;
}

void Linkage::set_beam_length(std::size_t beam, double length) {
  if (beam >= beams_.size()) {
    throw std::out_of_range("beam " + std::to_string(beam) + " does not exist");
  }
  if (!(length > 0.0)) throw std::invalid_argument("beam length must be positive");
  beams_[beam].length = length;
}

std::size_t Linkage::moving_count() const {
  return static_cast<std::size_t>(std::count(moving_.begin(), moving_.end(), 1));
}

std::vector<std::size_t> Linkage::node_parents(std::size_t node) const {
  if (node >= node_count()) throw std::out_of_range("node id out of range");
  if (node == kCrankTipNode) return {kMotorNode};
  if (node < kFirstJointNode) return {};
  const Joint& joint = joints_[node - kFirstJointNode];
  if (const auto* ext = std::get_if<ExtensionJoint>(&joint)) {
    const Beam& parent = beams_[ext->parent_beam];
    return {parent.a, parent.b};
  }
  const auto& two = std::get<TwoBeamJoint>(joint);
  return {two.parent_a, two.parent_b};
}

double Linkage::mean_beam_length() const {
  double sum = 0.0;
  for (const Beam& b : beams_) sum += b.length;
  return sum / static_cast<double>(beams_.size());
}

PathTrace::PathTrace(std::size_t steps, std::size_t nodes)
    : steps_(steps),
      nodes_(nodes),
      positions_(steps * nodes),
      known_(steps * nodes, 0),
      feasible_(steps, 0),
      moving_(nodes, 0) {}

void PathTrace::place(std::size_t step, std::size_t node, Point p) {
  const std::size_t i = step * nodes_ + node;
  positions_.at(i) = p;
  known_.at(i) = 1;
}

std::optional<Point> PathTrace::position(std::size_t step, std::size_t node) const {
  const std::size_t i = step * nodes_ + node;
  if (!known_.at(i)) return std::nullopt;
  return positions_[i];
}

std::optional<Point> circle_intersection(Point c1, double r1, Point c2, double r2,
                                         Branch branch) {
  const Point delta = c2 - c1;
  const double d = norm(delta);
  if (d <= kGeometryTolerance) return std::nullopt;
  if (d > r1 + r2 + kGeometryTolerance) return std::nullopt;
  if (d < std::abs(r1 - r2) - kGeometryTolerance) return std::nullopt;

  // Distance from c1 to the chord midpoint along c1->c2, then half-chord.
  const double along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h2 = r1 * r1 - along * along;
  const Point unit = (1.0 / d) * delta;
  const Point mid = c1 + along * unit;
  if (h2 <= 0.0) return mid;
  const double h = std::sqrt(h2);
  const Point left{-unit.y, unit.x};
  return branch == Branch::Left ? mid + h * left : mid - h * left;
}

PathTrace solve(const Linkage& linkage, std::size_t steps) {
  if (steps < 3) throw std::invalid_argument("solve needs at least 3 crank steps");
  const std::size_t nodes = linkage.node_count();
  PathTrace trace(steps, nodes);
  for (std::size_t n = 0; n < nodes; ++n) trace.moving_[n] = linkage.is_moving(n) ? 1 : 0;

  const auto& beams = linkage.beams();
  const auto& joints = linkage.joints();
  for (std::size_t k = 0; k < steps; ++k) {
    Point* pos = trace.positions_.data() + k * nodes;
    char* known = trace.known_.data() + k * nodes;
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(steps);
    pos[kMotorNode] = {0.0, 0.0};
    for (std::size_t s = 0; s < kStaticNodeCount; ++s) {
      pos[kFirstStaticNode + s] = linkage.static_nodes()[s];
    }
    pos[kCrankTipNode] = {linkage.crank_length() * std::cos(theta),
                          linkage.crank_length() * std::sin(theta)};
    std::fill(known, known + kFirstJointNode, 1);

    bool ok = true;
    for (std::size_t j = 0; j < joints.size() && ok; ++j) {
      const std::size_t node = kFirstJointNode + j;
      if (const auto* ext = std::get_if<ExtensionJoint>(&joints[j])) {
        const Beam& parent = beams[ext->parent_beam];
        const Point dir = pos[parent.b] - pos[parent.a];
        const double len = norm(dir);
        if (len <= kGeometryTolerance) {
          ok = false;
          break;
        }
        const Point anchor = ext->end == BeamEnd::A ? pos[parent.a] : pos[parent.b];
        const Point offset = rotate((1.0 / len) * dir, ext->angle_offset);
        pos[node] = anchor + beams[ext->beam].length * offset;
      } else {
        const auto& two = std::get<TwoBeamJoint>(joints[j]);
        const auto p = circle_intersection(pos[two.parent_a], beams[two.beam_a].length,
                                           pos[two.parent_b], beams[two.beam_b].length,
                                           two.branch);
        if (!p) {
          ok = false;
          break;
        }
        pos[node] = *p;
      }
      known[node] = 1;
    }
    trace.feasible_[k] = ok ? 1 : 0;
    if (!ok) ++trace.error_count;
  }

  // Foot: moving node with the lowest minimum y over feasible steps.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = kCrankTipNode; n < nodes; ++n) {
    if (!trace.moving_[n]) continue;
    for (std::size_t k = 0; k < steps; ++k) {
      if (!trace.feasible_[k]) continue;
      const double y = trace.positions_[k * nodes + n].y;
      if (y < best) {
        best = y;
        trace.foot_index = n;
      }
    }
  }
  trace.foot_path.reserve(steps - trace.error_count);
  trace.foot_steps.reserve(steps - trace.error_count);
  for (std::size_t k = 0; k < steps; ++k) {
    if (!trace.feasible_[k]) continue;
    trace.foot_path.push_back(trace.positions_[k * nodes + trace.foot_index]);
    trace.foot_steps.push_back(k);
  }
  return trace;
}

PathMetrics path_metrics(std::span<const Point> path) {
  if (path.empty()) return {};
  PathMetrics m;
  double min_x = path.front().x, max_x = min_x;
  double min_y = path.front().y, max_y = min_y;
  for (const Point& p : path) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  m.width = max_x - min_x;
  m.height = max_y - min_y;
  m.min_y = min_y;
  m.valid = true;
  return m;
}

}  // namespace linkqd
