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

#include "linkqd/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace linkqd {

namespace {

struct Rgb {
  double r, g, b;
};

// Viridis, sampled at five stops.
constexpr std::array<Rgb, 5> kViridis = {{{68, 1, 84},
                                          {59, 82, 139},
                                          {33, 145, 140},
                                          {94, 201, 98},
                                          {253, 231, 37}}};

std::string colour(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * static_cast<double>(kViridis.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(x), kViridis.size() - 2);
  const double f = x - static_cast<double>(i);
  const Rgb& a = kViridis[i];
  const Rgb& b = kViridis[i + 1];
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(a.r + f * (b.r - a.r))),
                static_cast<int>(std::lround(a.g + f * (b.g - a.g))),
                static_cast<int>(std::lround(a.b + f * (b.b - a.b))));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MapStyle parse_map_style(std::string_view name) {
  if (name == "heatmap") return MapStyle::Heatmap;
  if (name == "paths") return MapStyle::Paths;
  throw std::invalid_argument("unknown map mode '" + std::string(name) +
                              "' (expected heatmap|paths)");
}

double path_scale(double extent, const RenderOptions& options) {
  if (!(extent > 0.0)) return 0.0;
  return (options.cell_size - 2.0 * options.padding) / extent;
}

std::string render_map(const DownsampledMap& map, MapStyle style, const RenderOptions& options) {
  const double cs = options.cell_size;
  const double m = options.margin;
  const double width = 2.0 * m + cs * static_cast<double>(map.cols);
  const double height = 2.0 * m + cs * static_cast<double>(map.rows);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : map.cells) {
    if (!c) continue;
    lo = std::min(lo, c->elite.quality);
    hi = std::max(hi, c->elite.quality);
  }
  auto shade = [&](double q) { return colour(hi > lo ? (q - lo) / (hi - lo) : 1.0); };

  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << num(width) << R"(" height=")"
      << num(height) << R"(" viewBox="0 0 )" << num(width) << ' ' << num(height) << R"(">)"
      << '\n';
  svg << R"(<rect x="0" y="0" width=")" << num(width) << R"(" height=")" << num(height)
      << R"(" fill="white"/>)" << '\n';
  svg << R"(<g class="grid" stroke="#cccccc" fill="none">)" << '\n';
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      svg << R"(<rect x=")" << num(m + cs * static_cast<double>(c)) << R"(" y=")"
          << num(m + cs * static_cast<double>(r)) << R"(" width=")" << num(cs) << R"(" height=")"
          << num(cs) << R"("/>)" << '\n';
    }
  }
  svg << "</g>\n";

  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      const auto& cell = map.at(r, c);
      if (!cell) continue;
      // Row 0 is drawn at the bottom so the second dimension grows upwards.
      const double x0 = m + cs * static_cast<double>(c);
      const double y0 = m + cs * static_cast<double>(map.rows - 1 - r);
      const std::string fill = shade(cell->elite.quality);
      svg << R"(<g class="cell" data-row=")" << r << R"(" data-col=")" << c
          << R"(" data-source-cell=")" << cell->source_cell << R"(" data-fitness=")"
          << full(cell->elite.fitness.scalar) << '"';
      if (style == MapStyle::Heatmap) {
        svg << ">\n<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(cs)
            << "\" height=\"" << num(cs) << "\" fill=\"" << fill << "\"/>\n</g>\n";
        continue;
      }

      const double scale = path_scale(cell->extent, options);
      svg << R"( data-scale=")" << full(scale) << R"(">)" << '\n';
      const PathMetrics pm = path_metrics(cell->foot_path);
      if (!pm.valid) {
        svg << "</g>\n";
        continue;
      }
      double min_x = cell->foot_path.front().x;
      for (const Point& p : cell->foot_path) min_x = std::min(min_x, p.x);
      const double cx = x0 + cs / 2.0;
      const double cy = y0 + cs / 2.0;
      const double mid_x = min_x + pm.width / 2.0;
      const double mid_y = pm.min_y + pm.height / 2.0;
      if (scale == 0.0) {
        svg << R"(<circle cx=")" << num(cx) << R"(" cy=")" << num(cy) << R"(" r="2" fill=")"
            << fill << R"("/>)" << '\n';
      } else {
        svg << R"(<polyline fill="none" stroke-width="2" stroke=")" << fill << R"(" points=")";
        const bool closed = cell->elite.error_count == 0;
        const std::size_t count = cell->foot_path.size() + (closed ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i) {
          const Point& p = cell->foot_path[i % cell->foot_path.size()];
          if (i) svg << ' ';
          svg << num(cx + scale * (p.x - mid_x)) << ',' << num(cy - scale * (p.y - mid_y));
        }
        svg << R"("/>)" << '\n';
        char label[32];
        std::snprintf(label, sizeof label, "%.3g", scale);
        svg << R"(<text class="scale" x=")" << num(x0 + cs - 4.0) << R"(" y=")"
            << num(y0 + cs - 4.0) << R"(" font-size="11" text-anchor="end">)" << label
            << "</text>\n";
      }
      svg << "</g>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_linkage(const Linkage& linkage, const PathTrace& trace, std::size_t step) {
  if (step >= trace.steps()) throw std::out_of_range("step out of range");
  // Bounding box over every known position at every step.
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    for (std::size_t n = 0; n < trace.node_count(); ++n) {
      if (const auto p = trace.position(k, n)) {
        min_x = std::min(min_x, p->x);
        max_x = std::max(max_x, p->x);
        min_y = std::min(min_y, p->y);
        max_y = std::max(max_y, p->y);
      }
    }
  }
  const double pad = 20.0;
  const double w = max_x - min_x + 2.0 * pad;
  const double h = max_y - min_y + 2.0 * pad;
  auto sx = [&](double x) { return num(x - min_x + pad); };
  auto sy = [&](double y) { return num(max_y - y + pad); };

  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << num(w) << R"(" height=")"
      << num(h) << R"(" viewBox="0 0 )" << num(w) << ' ' << num(h) << R"(">)" << '\n';
  svg << R"(<rect x="0" y="0" width=")" << num(w) << R"(" height=")" << num(h)
      << R"(" fill="white"/>)" << '\n';
  for (const Point& p : trace.foot_path) {
    svg << R"(<circle class="foot-path" cx=")" << sx(p.x) << R"(" cy=")" << sy(p.y)
        << R"(" r="1.5" fill="#2ca02c"/>)" << '\n';
  }
  for (const Beam& b : linkage.beams()) {
    const auto pa = trace.position(step, b.a);
    const auto pb = trace.position(step, b.b);
    if (!pa || !pb) continue;
    svg << R"(<line class="beam" x1=")" << sx(pa->x) << R"(" y1=")" << sy(pa->y) << R"(" x2=")"
        << sx(pb->x) << R"(" y2=")" << sy(pb->y) << R"(" stroke="#555555" stroke-width="3"/>)"
        << '\n';
  }
  for (std::size_t n = 0; n < trace.node_count(); ++n) {
    const auto p = trace.position(step, n);
    if (!p) continue;
    const char* fill = n == kMotorNode            ? "#f2c500"
                       : !linkage.is_moving(n)    ? "#1abc9c"
                       : n == trace.foot_index    ? "#d62728"
                                                  : "#8e44ad";
    svg << R"(<circle class="node" data-node=")" << n << R"(" cx=")" << sx(p->x) << R"(" cy=")"
        << sy(p->y) << R"(" r="4" fill=")" << fill << R"("/>)" << '\n';
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace linkqd
