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

#include "linkqd/downsample.hpp"

#include <algorithm>
#include <stdexcept>

namespace linkqd {

std::size_t DownsampledMap::filled() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
}

std::array<std::size_t, 2> display_position(const GridSpec& grid, std::size_t cell,
                                            std::size_t rows, std::size_t cols,
                                            std::array<std::size_t, 2> dims) {
  const auto coords = grid.coords(cell);
  const std::size_t col = coords[dims[0]] * cols / grid.axes[dims[0]].bins;
  const std::size_t row = coords[dims[1]] * rows / grid.axes[dims[1]].bins;
  return {row, col};
}

std::vector<Point> simulate_foot_path(const Genome& g, const RunInfo& info) {
  return solve(decode(g, info.encoding), info.steps).foot_path;
}

DownsampledMap downsample(const Repertoire& r, std::size_t rows, std::size_t cols,
                          std::array<std::size_t, 2> dims) {
  const std::size_t ndims = r.grid.axes.size();
  if (dims[0] >= ndims || dims[1] >= ndims || dims[0] == dims[1]) {
    throw std::invalid_argument("display dims must be two distinct grid dimensions");
  }
  if (cols == 0 || rows == 0 || cols > r.grid.axes[dims[0]].bins ||
      rows > r.grid.axes[dims[1]].bins) {
    throw std::invalid_argument("display grid must have between 1 and bins cells per side");
  }

  DownsampledMap map;
  map.rows = rows;
  map.cols = cols;
  map.dims = dims;
  map.fitness = r.info.fitness;
  map.cells.resize(rows * cols);

  std::vector<const std::pair<const std::size_t, Evaluation>*> best(rows * cols, nullptr);
  for (const auto& entry : r.cells) {
    const auto [row, col] = display_position(r.grid, entry.first, rows, cols, dims);
    auto& slot = best[row * cols + col];
    if (!slot || entry.second.quality > slot->second.quality) slot = &entry;
  }

  double largest = 0.0;
  for (std::size_t i = 0; i < best.size(); ++i) {
    if (!best[i]) continue;
    DisplayCell cell;
    cell.source_cell = best[i]->first;
    cell.elite = best[i]->second;
    cell.foot_path = simulate_foot_path(cell.elite.genome, r.info);
    const PathMetrics m = path_metrics(cell.foot_path);
    cell.extent = std::max(m.width, m.height);
    largest = std::max(largest, cell.extent);
    map.cells[i] = std::move(cell);
  }
  for (auto& cell : map.cells) {
    if (cell) cell->relative_scale = largest > 0.0 ? cell->extent / largest : 0.0;
  }
  return map;
}

}  // namespace linkqd
