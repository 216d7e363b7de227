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

#include "linkqd/repertoire.hpp"

#include <algorithm>
#include <stdexcept>

namespace linkqd {

bool insert_elite(Repertoire& r, Evaluation e) {
  if (!e.descriptor) throw std::invalid_argument("insert_elite needs a descriptor");
  const std::size_t cell = bin(*e.descriptor, r.grid);
  auto it = r.cells.find(cell);
  if (it == r.cells.end()) {
    r.cells.emplace(cell, std::move(e));
    return true;
  }
  if (e.quality > it->second.quality) {
    it->second = std::move(e);
    return true;
  }
  return false;
}

double qd_score(const Repertoire& r, double offset) {
  double score = 0.0;
  for (const auto& [cell, elite] : r.cells) score += std::max(0.0, elite.quality + offset);
  return score;
}

double default_qd_offset(FitnessKind kind, std::size_t steps) {
  // F_p: 5 m of summed target distance. F_sl: angle error and infeasibility
  // are each bounded by the step count.
  return kind == FitnessKind::Fp ? 5000.0 : 2.0 * static_cast<double>(steps);
}

}  // namespace linkqd
