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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "linkqd/genome.hpp"
#include "linkqd/kinematics.hpp"

namespace linkqd {

enum class DescriptorSpace { WH, LIS, ST, AU };

std::string_view to_string(DescriptorSpace space);
/// Accepts "wh" / "lis" / "st" / "au"; throws std::invalid_argument otherwise.
DescriptorSpace parse_descriptor_space(std::string_view name);
std::size_t dimensions(DescriptorSpace space);

struct Descriptor {
  std::vector<double> values;
  DescriptorSpace space = DescriptorSpace::WH;
};

struct GridAxis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t bins = 1;

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

/// Axis-aligned binning of a descriptor space. Cells are numbered row-major
/// with the first axis most significant.
struct GridSpec {
  std::vector<GridAxis> axes;

  /// Throws std::invalid_argument on an empty grid, lower >= upper or zero bins.
  void validate() const;
  [[nodiscard]] std::size_t total_cells() const;
  [[nodiscard]] std::size_t cell_index(std::span<const std::size_t> coords) const;
  [[nodiscard]] std::vector<std::size_t> coords(std::size_t cell) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// 100 x 100 for the two-dimensional spaces, 10^4 for the four-dimensional
/// ones: 10,000 cells either way. AU bounds are placeholders until the first
/// autoencoder training sets them.
GridSpec default_grid(DescriptorSpace space, const EncodingConfig& enc);

/// Upper end of the structural count axes (path length, contributing nodes).
inline constexpr double kStructureCountCap = 10.0;

/// (width, height) of the foot path; nullopt for an empty path.
std::optional<Descriptor> descriptor_wh(const PathTrace& trace);
/// (mean beam length, lift); nullopt for an empty path.
std::optional<Descriptor> descriptor_lis(const Linkage& linkage, const PathTrace& trace);
/// (mean beam length, longest connection-to-foot path, contributing nodes,
/// moving / total nodes).
Descriptor descriptor_st(const Linkage& linkage, std::size_t foot);

/// Max over the chassis connections (motor and static nodes) that reach the
/// foot through beams of the shortest beam-count path to the foot. Capped at
/// kStructureCountCap, and equal to it when nothing reaches the foot.
double connection_path_length(const Linkage& linkage, std::size_t foot);
/// Crank tip and joints in the foot's dependency closure, foot included.
std::size_t contributing_nodes(const Linkage& linkage, std::size_t foot);

std::size_t bin_value(double v, const GridAxis& axis);
std::size_t bin(std::span<const double> values, const GridSpec& grid);
inline std::size_t bin(const Descriptor& d, const GridSpec& grid) { return bin(d.values, grid); }

}  // namespace linkqd
