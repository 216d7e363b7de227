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

#include "linkqd/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

#include "linkqd/fitness.hpp"

namespace linkqd {

std::string_view to_string(DescriptorSpace space) {
  switch (space) {
    case DescriptorSpace::WH: return "wh";
    case DescriptorSpace::LIS: return "lis";
    case DescriptorSpace::ST: return "st";
    case DescriptorSpace::AU: return "au";
  }
  return "?";
}

DescriptorSpace parse_descriptor_space(std::string_view name) {
  if (name == "wh") return DescriptorSpace::WH;
  if (name == "lis") return DescriptorSpace::LIS;
  if (name == "st") return DescriptorSpace::ST;
  if (name == "au") return DescriptorSpace::AU;
  throw std::invalid_argument("unknown descriptor space '" + std::string(name) +
                              "' (expected wh|lis|st|au)");
}

std::size_t dimensions(DescriptorSpace space) {
  return space == DescriptorSpace::WH || space == DescriptorSpace::LIS ? 2 : 4;
}

void GridSpec::validate() const {
  if (axes.empty()) throw std::invalid_argument("grid needs at least one axis");
  for (const GridAxis& a : axes) {
    if (!(a.lower < a.upper)) throw std::invalid_argument("grid axis needs lower < upper");
    if (a.bins == 0) throw std::invalid_argument("grid axis needs at least one bin");
  }
}

std::size_t GridSpec::total_cells() const {
  std::size_t total = 1;
  for (const GridAxis& a : axes) total *= a.bins;
  return total;
}

std::size_t GridSpec::cell_index(std::span<const std::size_t> coords) const {
  if (coords.size() != axes.size()) throw std::invalid_argument("coordinate arity mismatch");
  std::size_t index = 0;
  for (std::size_t d = 0; d < axes.size(); ++d) {
    if (coords[d] >= axes[d].bins) throw std::out_of_range("grid coordinate out of range");
    index = index * axes[d].bins + coords[d];
  }
  return index;
}

std::vector<std::size_t> GridSpec::coords(std::size_t cell) const {
  if (cell >= total_cells()) throw std::out_of_range("cell index out of range");
  std::vector<std::size_t> out(axes.size());
  for (std::size_t d = axes.size(); d-- > 0;) {
    out[d] = cell % axes[d].bins;
    cell /= axes[d].bins;
  }
  return out;
}

GridSpec default_grid(DescriptorSpace space, const EncodingConfig& enc) {
  switch (space) {
    case DescriptorSpace::WH:
      return {{{0.0, 300.0, 100}, {0.0, 300.0, 100}}};
    case DescriptorSpace::LIS:
      return {{{0.0, 300.0, 100}, {0.0, 150.0, 100}}};
    case DescriptorSpace::ST:
      return {{{enc.beam_len_min, enc.beam_len_max, 10},
               {1.0, kStructureCountCap + 1.0, 10},
               {1.0, kStructureCountCap + 1.0, 10},
               {0.0, 1.0, 10}}};
    case DescriptorSpace::AU:
      return {{{-1.0, 1.0, 10}, {-1.0, 1.0, 10}, {-1.0, 1.0, 10}, {-1.0, 1.0, 10}}};
  }
  throw std::invalid_argument("unknown descriptor space");
}

std::optional<Descriptor> descriptor_wh(const PathTrace& trace) {
  const PathMetrics m = path_metrics(trace);
  if (!m.valid) return std::nullopt;
  return Descriptor{{m.width, m.height}, DescriptorSpace::WH};
}

std::optional<Descriptor> descriptor_lis(const Linkage& linkage, const PathTrace& trace) {
  if (trace.foot_path.empty()) return std::nullopt;
  return Descriptor{{linkage.mean_beam_length(), lift(trace)}, DescriptorSpace::LIS};
}

double connection_path_length(const Linkage& linkage, std::size_t foot) {
  const std::size_t n = linkage.node_count();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const Beam& b : linkage.beams()) {
    adjacency[b.a].push_back(b.b);
    adjacency[b.b].push_back(b.a);
  }
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> hops(n, kUnreached);
  std::deque<std::size_t> queue{foot};
  hops[foot] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adjacency[u]) {
      if (hops[v] == kUnreached) {
        hops[v] = hops[u] + 1;
        queue.push_back(v);
      }
    }
  }
  std::size_t longest = 0;
  bool reached = false;
  for (std::size_t c = kMotorNode; c < kFirstStaticNode + kStaticNodeCount; ++c) {
    if (hops[c] == kUnreached) continue;
    reached = true;
    longest = std::max(longest, hops[c]);
  }
  if (!reached) return kStructureCountCap;
  return std::min(static_cast<double>(longest), kStructureCountCap);
}

std::size_t contributing_nodes(const Linkage& linkage, std::size_t foot) {
  std::vector<char> seen(linkage.node_count(), 0);
  std::vector<std::size_t> stack{foot};
  seen[foot] = 1;
  std::size_t count = 0;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (u >= kCrankTipNode) ++count;
    for (std::size_t p : linkage.node_parents(u)) {
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return count;
}

Descriptor descriptor_st(const Linkage& linkage, std::size_t foot) {
  const auto total = static_cast<double>(linkage.node_count());
  return Descriptor{{linkage.mean_beam_length(), connection_path_length(linkage, foot),
                     static_cast<double>(contributing_nodes(linkage, foot)),
                     static_cast<double>(linkage.moving_count()) / total},
                    DescriptorSpace::ST};
}

std::size_t bin_value(double v, const GridAxis& axis) {
  const double t = (v - axis.lower) / (axis.upper - axis.lower) * static_cast<double>(axis.bins);
  if (!(t > 0.0)) return 0;  // also maps NaN to the first bin
  const double f = std::floor(t);
  if (f >= static_cast<double>(axis.bins - 1)) return axis.bins - 1;
  return static_cast<std::size_t>(f);
}

std::size_t bin(std::span<const double> values, const GridSpec& grid) {
  if (values.size() != grid.axes.size()) {
    throw std::invalid_argument("descriptor has " + std::to_string(values.size()) +
                                " values, grid has " + std::to_string(grid.axes.size()) +
                                " axes");
  }
  std::size_t index = 0;
  for (std::size_t d = 0; d < values.size(); ++d) {
    index = index * grid.axes[d].bins + bin_value(values[d], grid.axes[d]);
  }
  return index;
}

}  // namespace linkqd
