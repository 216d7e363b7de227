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

#include "linkqd/nsga2.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace linkqd {

std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives> points) {
  // Two-objective sweep: visit points by decreasing first objective (ties by
  // decreasing second). Within a front the second objective then increases,
  // so a front dominates a new point iff its most recently added member does.
  // Being dominated by front k+1 implies being dominated by front k, which
  // makes the front search a binary search.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][0] != points[b][0]) return points[a][0] > points[b][0];
    return points[a][1] > points[b][1];
  });

  std::vector<std::vector<std::size_t>> fronts;
  for (std::size_t q : order) {
    std::size_t lo = 0;
    std::size_t hi = fronts.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (dominates(points[fronts[mid].back()], points[q])) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo == fronts.size()) fronts.emplace_back();
    fronts[lo].push_back(q);
  }
  for (auto& f : fronts) std::sort(f.begin(), f.end());
  return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> points,
                                      std::span<const std::size_t> front) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = front.size();
  std::vector<double> dist(n, 0.0);
  if (n <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < 2; ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points[front[a]][m] < points[front[b]][m];
    });
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    const double range = points[front[order.back()]][m] - points[front[order.front()]][m];
    if (!(range > 0.0)) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      dist[order[i]] +=
          (points[front[order[i + 1]]][m] - points[front[order[i - 1]]][m]) / range;
    }
  }
  return dist;
}

std::vector<std::size_t> nsga2_select(std::span<const Objectives> points, std::size_t count) {
  std::vector<std::size_t> chosen;
  chosen.reserve(std::min(count, points.size()));
  for (const auto& front : nondominated_sort(points)) {
    if (chosen.size() >= count) break;
    if (chosen.size() + front.size() <= count) {
      chosen.insert(chosen.end(), front.begin(), front.end());
      continue;
    }
    const std::vector<double> crowd = crowding_distance(points, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
    for (std::size_t i = 0; chosen.size() < count; ++i) chosen.push_back(front[order[i]]);
  }
  return chosen;
}

double hypervolume(std::span<const Objectives> points, const Objectives& reference) {
  std::vector<Objectives> kept;
  for (const Objectives& p : points) {
    if (p[0] > reference[0] && p[1] > reference[1]) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(), [](const Objectives& a, const Objectives& b) {
    return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1];
  });
  double volume = 0.0;
  double ceiling = reference[1];
  for (const Objectives& p : kept) {
    if (p[1] <= ceiling) continue;
    volume += (p[0] - reference[0]) * (p[1] - ceiling);
    ceiling = p[1];
  }
  return volume;
}

}  // namespace linkqd
