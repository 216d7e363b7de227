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

#include "linkqd/buildsheet.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace linkqd {

double snap_length(double length, double pitch) {
  if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be positive");
  const double n = std::max(1.0, std::floor(length / pitch + 0.5));
  return n * pitch;
}

BuildSheet build_sheet(const Genome& genome, const RunInfo& info, double pitch) {
  return build_sheet(decode(genome, info.encoding), info, pitch);
}

BuildSheet build_sheet(Linkage linkage, const RunInfo& info, double pitch) {
  if (!(pitch > 0.0)) throw std::invalid_argument("pitch must be positive");
  BuildSheet sheet;
  sheet.pitch = pitch;
  sheet.steps = info.steps;
  sheet.fitness_kind = info.fitness;
  sheet.static_nodes = linkage.static_nodes();

  const PathTrace evolved = solve(linkage, info.steps);
  sheet.evolved_fitness = evaluate_fitness(info.fitness, evolved, info.targets).scalar;
  sheet.evolved_error_count = evolved.error_count;

  for (std::size_t i = 0; i < linkage.beams().size(); ++i) {
    const Beam b = linkage.beams()[i];
    BeamPart part{i, b.a, b.b, b.length, snap_length(b.length, pitch), 0};
    part.holes = static_cast<std::size_t>(std::lround(part.snapped / pitch));
    sheet.beams.push_back(part);
    linkage.set_beam_length(i, part.snapped);
  }
  const PathTrace snapped = solve(linkage, info.steps);
  sheet.snapped_fitness = evaluate_fitness(info.fitness, snapped, info.targets).scalar;
  sheet.snapped_error_count = snapped.error_count;
  return sheet;
}

std::string format_build_sheet(const BuildSheet& sheet) {
  std::ostringstream out;
  char line[160];
  if (sheet.snapped_fails()) {
    out << "!!! WARNING: the snapped linkage cannot be assembled at any crank angle "
           "(error count "
        << sheet.snapped_error_count << " of " << sheet.steps << ") !!!\n\n";
  }
  std::snprintf(line, sizeof line, "Build sheet  pitch %.3g mm  fitness %s\n", sheet.pitch,
                std::string(to_string(sheet.fitness_kind)).c_str());
  out << line;
  out << "Static nodes (mm, relative to motor):\n";
  for (std::size_t i = 0; i < sheet.static_nodes.size(); ++i) {
    std::snprintf(line, sizeof line, "  S%zu  (%8.2f, %8.2f)\n", i + 1, sheet.static_nodes[i].x,
                  sheet.static_nodes[i].y);
    out << line;
  }
  out << "beam  nodes     evolved_mm  snapped_mm  holes\n";
  for (const BeamPart& b : sheet.beams) {
    std::snprintf(line, sizeof line, "%4zu  %2zu-%-2zu  %11.3f  %10.1f  %5zu%s\n", b.beam, b.from,
                  b.to, b.evolved, b.snapped, b.holes, b.beam == kCrankBeam ? "  (crank)" : "");
    out << line;
  }
  std::snprintf(line, sizeof line, "evolved fitness %.6g (errors %zu)\n", sheet.evolved_fitness,
                sheet.evolved_error_count);
  out << line;
  std::snprintf(line, sizeof line, "snapped fitness %.6g (errors %zu)  delta %+.6g\n",
                sheet.snapped_fitness, sheet.snapped_error_count,
                sheet.snapped_fitness - sheet.evolved_fitness);
  out << line;
  return out.str();
}

nlohmann::json to_json(const BuildSheet& sheet) {
  nlohmann::json beams = nlohmann::json::array();
  for (const BeamPart& b : sheet.beams) {
    beams.push_back({{"beam", b.beam},
                     {"from", b.from},
                     {"to", b.to},
                     {"evolved_mm", b.evolved},
                     {"snapped_mm", b.snapped},
                     {"holes", b.holes}});
  }
  nlohmann::json statics = nlohmann::json::array();
  for (const Point& p : sheet.static_nodes) statics.push_back({p.x, p.y});
  return {{"pitch", sheet.pitch},
          {"steps", sheet.steps},
          {"fitness_kind", std::string(to_string(sheet.fitness_kind))},
          {"static_nodes", statics},
          {"beams", beams},
          {"evolved_fitness", sheet.evolved_fitness},
          {"evolved_error_count", sheet.evolved_error_count},
          {"snapped_fitness", sheet.snapped_fitness},
          {"snapped_error_count", sheet.snapped_error_count},
          {"snapped_fails", sheet.snapped_fails()}};
}

}  // namespace linkqd
