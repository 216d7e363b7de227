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

// Reference implementations used to check the library. Each one is written
// independently of the code under test and favours obviousness over speed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "linkqd/geometry.hpp"
#include "linkqd/nsga2.hpp"
#include "linkqd/repertoire.hpp"

namespace oracle {

using linkqd::Point;

/// Crank-rocker four-bar with the crank pivot at the origin and the rocker
/// pivot at `ground`. Link lengths: a crank, b coupler, c rocker.
struct FourBar {
  Point ground;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Grashof with the crank as the shortest link, so the crank turns fully.
inline bool crank_rocker(double a, double b, double c, double d, double margin = 0.0) {
  const double s = std::min({a, b, c, d});
  const double l = std::max({a, b, c, d});
  const double others = a + b + c + d - s - l;
  return s == a && s + l + margin < others;
}

/// Rocker pin positions for crank angle theta (absolute, from +x), both
/// assembly modes, by the half-angle (Freudenstein) closed form rather than
/// circle intersection.
inline std::array<Point, 2> four_bar_pin(const FourBar& fb, double theta) {
  const double d = std::hypot(fb.ground.x, fb.ground.y);
  const double phi = std::atan2(fb.ground.y, fb.ground.x);
  const double t2 = theta - phi;  // crank angle in the ground frame
  const double k1 = d / fb.a;
  const double k2 = d / fb.c;
  const double k3 = (fb.a * fb.a - fb.b * fb.b + fb.c * fb.c + d * d) / (2.0 * fb.a * fb.c);
  const double A = std::cos(t2) - k1 - k2 * std::cos(t2) + k3;
  const double B = -2.0 * std::sin(t2);
  const double C = k1 - (k2 + 1.0) * std::cos(t2) + k3;
  const double disc = std::sqrt(std::max(0.0, B * B - 4.0 * A * C));
  std::array<Point, 2> out;
  for (int s = 0; s < 2; ++s) {
    const double t4 = 2.0 * std::atan2(-B + (s == 0 ? disc : -disc), 2.0 * A);
    const Point local{d + fb.c * std::cos(t4), fb.c * std::sin(t4)};
    out[s] = linkqd::rotate(local, phi);
  }
  return out;
}

inline double nearest_distance(Point p, std::span<const Point> path) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& q : path) {
    best = std::min(best, std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)));
  }
  return best;
}

/// Fronts by repeatedly peeling the points no remaining point dominates.
inline std::vector<std::vector<std::size_t>> fronts(std::span<const linkqd::Objectives> pts) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> removed(pts.size(), false);
  std::size_t left = pts.size();
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (removed[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
        if (removed[j] || j == i) continue;
        const auto& p = pts[j];
        const auto& q = pts[i];
        dominated = p[0] >= q[0] && p[1] >= q[1] && (p[0] > q[0] || p[1] > q[1]);
      }
      if (!dominated) front.push_back(i);
    }
    for (std::size_t i : front) removed[i] = true;
    left -= front.size();
    out.push_back(std::move(front));
  }
  return out;
}

/// Axis-aligned rectangle from (x0, y0), traversed counter-clockwise starting
/// at the bottom-left corner with `spacing` mm between points.
inline std::vector<Point> rectangle(double width, double height, double spacing = 1.0,
                                    Point origin = {}) {
  std::vector<Point> out;
  const auto nw = static_cast<int>(std::lround(width / spacing));
  const auto nh = static_cast<int>(std::lround(height / spacing));
  for (int i = 0; i < nw; ++i) out.push_back({i * spacing, 0.0});
  for (int i = 0; i < nh; ++i) out.push_back({width, i * spacing});
  for (int i = 0; i < nw; ++i) out.push_back({width - i * spacing, height});
  for (int i = 0; i < nh; ++i) out.push_back({0.0, height - i * spacing});
  for (Point& p : out) p = p + origin;
  return out;
}

/// Counter-clockwise circle starting at angle `start`.
inline std::vector<Point> circle(Point centre, double radius, std::size_t n, double start = 0.0) {
  std::vector<Point> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = start + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    out.push_back({centre.x + radius * std::cos(t), centre.y + radius * std::sin(t)});
  }
  return out;
}

/// Best elite (highest quality, lowest cell on ties) over every source cell
/// whose display coordinates are (row, col), found by scanning the whole grid.
inline std::optional<std::size_t> best_of_region(const linkqd::Repertoire& r, std::size_t rows,
                                                 std::size_t cols, std::size_t row, std::size_t col,
                                                 std::array<std::size_t, 2> dims = {0, 1}) {
  std::optional<std::size_t> best;
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t cell = 0; cell < r.grid.total_cells(); ++cell) {
    const auto it = r.cells.find(cell);
    if (it == r.cells.end()) continue;
    // Decompose the flat index by hand, last axis fastest.
    std::vector<std::size_t> coords(r.grid.axes.size());
    std::size_t rest = cell;
    for (std::size_t d = coords.size(); d-- > 0;) {
      coords[d] = rest % r.grid.axes[d].bins;
      rest /= r.grid.axes[d].bins;
    }
    const std::size_t bins_c = r.grid.axes[dims[0]].bins;
    const std::size_t bins_r = r.grid.axes[dims[1]].bins;
    // Display block boundaries: block j covers [ceil(j*bins/n), ceil((j+1)*bins/n)).
    const bool in_col = coords[dims[0]] * cols >= col * bins_c && coords[dims[0]] * cols < (col + 1) * bins_c;
    const bool in_row = coords[dims[1]] * rows >= row * bins_r && coords[dims[1]] * rows < (row + 1) * bins_r;
    if (!in_col || !in_row) continue;
    if (!best || it->second.quality > best_q) {
      best = cell;
      best_q = it->second.quality;
    }
  }
  return best;
}

}  // namespace oracle
