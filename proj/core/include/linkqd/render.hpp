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
#include <string>
#include <string_view>

#include "linkqd/downsample.hpp"
#include "linkqd/kinematics.hpp"

namespace linkqd {

enum class MapStyle { Heatmap, Paths };

/// Accepts "heatmap" / "paths"; throws std::invalid_argument otherwise.
MapStyle parse_map_style(std::string_view name);

struct RenderOptions {
  double cell_size = 120.0;
  double margin = 40.0;
  /// Gap between a path's bounding box and its cell border in path mode.
  double padding = 10.0;
};

/// Path-mode zoom: the drawable cell width over the path's larger side.
/// Zero extent yields 0 (the path is drawn as a dot, unannotated).
double path_scale(double extent, const RenderOptions& options = {});

/// SVG of a display map. Heatmap mode fills each populated cell with a colour
/// for its elite's fitness; path mode draws each elite's foot path scaled to
/// fit its cell, stroke coloured by fitness, with the zoom factor written in
/// the bottom-right corner. Empty cells stay blank. Every populated cell is a
/// <g class="cell"> carrying data-row, data-col, data-fitness (and data-scale
/// in path mode).
std::string render_map(const DownsampledMap& map, MapStyle style,
                       const RenderOptions& options = {});

/// SVG of a linkage at one crank step with the full foot path overlaid:
/// motor, static nodes, moving nodes and beams.
std::string render_linkage(const Linkage& linkage, const PathTrace& trace, std::size_t step = 0);

}  // namespace linkqd
