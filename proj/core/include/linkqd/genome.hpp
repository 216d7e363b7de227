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
#include <vector>

#include "linkqd/kinematics.hpp"
#include "linkqd/rng.hpp"

namespace linkqd {

/// Maps unit-interval genes onto physical ranges (mm). Defaults assume an
/// 8 mm hole pitch: beams of 2 to 19 holes.
struct EncodingConfig {
  std::size_t n_joints = 8;
  double static_pos_range = 100.0;
  double crank_len_min = 10.0;
  double crank_len_max = 60.0;
  double beam_len_min = 16.0;
  double beam_len_max = 152.0;

  /// Throws std::invalid_argument when a range is empty or n_joints == 0.
  void validate() const;
  [[nodiscard]] std::size_t genome_length() const;

  friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

inline constexpr std::size_t kSectionSize = 7;
inline constexpr double kInitialSigma = 0.1;
inline constexpr double kGeneMutationRate = 0.2;
inline constexpr double kSigmaMutationRate = 0.2;
inline constexpr double kSigmaNoise = 0.1;
inline constexpr double kExtensionThreshold = 0.25;

// Header section: x/y of the three static nodes, then the crank length.
inline constexpr std::size_t kCrankLengthGene = 6;

// Slots within a joint section.
namespace slot {
inline constexpr std::size_t kType = 0;
inline constexpr std::size_t kNode = 1;
inline constexpr std::size_t kBeamOrNode = 2;
inline constexpr std::size_t kDirection = 3;
inline constexpr std::size_t kAngle = 4;
inline constexpr std::size_t kLength = 5;
inline constexpr std::size_t kSecondLength = 6;
}  // namespace slot

struct Genome {
  std::vector<double> genes;
  double sigma = kInitialSigma;

  friend bool operator==(const Genome&, const Genome&) = default;
};

Genome random_genome(Rng& rng, const EncodingConfig& cfg);

/// Reflects a value back into [0, 1]: v < 0 -> -v, v > 1 -> 2 - v, repeated.
double bounce_back(double v);

/// True when gene `index` currently decodes to a beam or crank length.
bool is_length_gene(const Genome& g, std::size_t index);

/// Self-adaptive Gaussian mutation. Length genes always receive N(0, sigma)
/// noise, every other gene with probability 0.2; sigma itself receives
/// N(0, 0.1) with probability 0.2. All values, sigma included, are bounced
/// back into [0, 1] once all noise has been added.
Genome mutate(const Genome& g, Rng& rng);

/// Floor mapping of a unit gene onto [0, size), total for every gene in [0, 1].
std::size_t index_gene(double gene, std::size_t size);

/// Pure mapping from genes to a linkage. Every genome of the configured length
/// decodes; infeasible geometry only shows up when the linkage is solved.
/// Throws std::invalid_argument on a length mismatch.
Linkage decode(const Genome& g, const EncodingConfig& cfg);

}  // namespace linkqd
