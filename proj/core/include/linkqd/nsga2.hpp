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
#include <span>
#include <vector>

namespace linkqd {

/// Two objectives, both maximised.
using Objectives = std::array<double, 2>;

/// a >= b in both objectives and > in at least one.
constexpr bool dominates(const Objectives& a, const Objectives& b) {
  return a[0] >= b[0] && a[1] >= b[1] && (a[0] > b[0] || a[1] > b[1]);
}

/// Fast non-dominated sort. Returns fronts of input indices, best front first;
/// indices inside a front are ascending. The fronts partition the input.
std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const Objectives> points);

/// Crowding distance of each member of `front` (indices into `points`), in
/// the same order as `front`. Boundary members get +inf; fronts of at most two
/// members are all +inf. Objectives with zero spread contribute nothing.
std::vector<double> crowding_distance(std::span<const Objectives> points,
                                      std::span<const std::size_t> front);

/// NSGA-II environmental selection: the first `count` indices when sorted by
/// (front rank ascending, crowding descending, index ascending).
std::vector<std::size_t> nsga2_select(std::span<const Objectives> points, std::size_t count);

/// Area dominated by `points` and bounded below by `reference`. Points that do
/// not strictly dominate the reference in both objectives are ignored.
double hypervolume(std::span<const Objectives> points, const Objectives& reference);

}  // namespace linkqd
