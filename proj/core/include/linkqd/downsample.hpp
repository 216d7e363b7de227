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
#include <vector>

#include "linkqd/geometry.hpp"
#include "linkqd/repertoire.hpp"

namespace linkqd {

struct DisplayCell {
  std::size_t source_cell = 0;
  Evaluation elite;
  /// Re-simulated foot path of the elite, in step order.
  std::vector<Point> foot_path;
  /// max(width, height) of the foot path, mm.
  double extent = 0.0;
  /// extent relative to the largest extent on the map (1 for the largest).
  double relative_scale = 0.0;
};

/// Coarse view of a repertoire for a human to browse. Columns follow the
/// first display dimension, rows the second.
struct DownsampledMap {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::array<std::size_t, 2> dims{0, 1};
  FitnessKind fitness = FitnessKind::Fp;
  std::vector<std::optional<DisplayCell>> cells;  // row-major

  [[nodiscard]] const std::optional<DisplayCell>& at(std::size_t row, std::size_t col) const {
    return cells.at(row * cols + col);
  }
  [[nodiscard]] std::size_t filled() const;
};

/// Display (row, col) that grid cell `cell` falls into.
std::array<std::size_t, 2> display_position(const GridSpec& grid, std::size_t cell,
                                            std::size_t rows, std::size_t cols,
                                            std::array<std::size_t, 2> dims);

/// Splits the display dimensions' bins into rows x cols contiguous blocks and
/// keeps the best elite of each block, maximising over the non-displayed
/// dimensions too. Ties keep the lower cell index. Throws
/// std::invalid_argument on repeated or out-of-range dims, or more blocks than
/// bins.
DownsampledMap downsample(const Repertoire& r, std::size_t rows, std::size_t cols,
                          std::array<std::size_t, 2> dims = {0, 1});

/// Foot path of a genome under the archive's encoding and step count.
std::vector<Point> simulate_foot_path(const Genome& g, const RunInfo& info);

}  // namespace linkqd
