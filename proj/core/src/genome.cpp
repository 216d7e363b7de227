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

#include "linkqd/genome.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace linkqd {

void EncodingConfig::validate() const {
  if (n_joints == 0) throw std::invalid_argument("n_joints must be at least 1");
  if (!(static_pos_range > 0.0)) throw std::invalid_argument("static_pos_range must be positive");
  if (!(crank_len_min > 0.0) || !(crank_len_min < crank_len_max)) {
    throw std::invalid_argument("crank length range must satisfy 0 < min < max");
  }
  if (!(beam_len_min > 0.0) || !(beam_len_min < beam_len_max)) {
    throw std::invalid_argument("beam length range must satisfy 0 < min < max");
  }
}

std::size_t EncodingConfig::genome_length() const { return kSectionSize * (1 + n_joints); }

Genome random_genome(Rng& rng, const EncodingConfig& cfg) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Genome g;
  g.genes.resize(cfg.genome_length());
  for (double& v : g.genes) v = unit(rng);
  g.sigma = kInitialSigma;
  return g;
}

double bounce_back(double v) {
  while (v < 0.0 || v > 1.0) {
    if (v < 0.0) v = -v;
    if (v > 1.0) v = 2.0 - v;
  }
  return v;
}

bool is_length_gene(const Genome& g, std::size_t index) {
  if (index < kSectionSize) return index == kCrankLengthGene;
  const std::size_t base = index - index % kSectionSize;
  const std::size_t offset = index % kSectionSize;
  const bool extension = g.genes[base + slot::kType] < kExtensionThreshold;
  if (offset == slot::kLength) return true;
  return offset == slot::kSecondLength && !extension;
}

Genome mutate(const Genome& g, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Genome child = g;
  // Draw the same number of variates regardless of sigma and gene roles so
  // streams stay aligned across genomes.
  for (std::size_t i = 0; i < g.genes.size(); ++i) {
    const double z = gauss(rng);
    const bool hit = unit(rng) < kGeneMutationRate;
    if (is_length_gene(g, i) || hit) child.genes[i] += g.sigma * z;
  }
  const double z = gauss(rng);
  if (unit(rng) < kSigmaMutationRate) child.sigma += kSigmaNoise * z;

  for (double& v : child.genes) v = bounce_back(v);
  child.sigma = bounce_back(child.sigma);
  return child;
}

std::size_t index_gene(double gene, std::size_t size) {
  const auto i = static_cast<std::size_t>(std::floor(std::clamp(gene, 0.0, 1.0) *
                                                     static_cast<double>(size)));
  return std::min(i, size - 1);
}

namespace {

double lerp_gene(double gene, double lo, double hi) { return lo + gene * (hi - lo); }

}  // namespace

Linkage decode(const Genome& g, const EncodingConfig& cfg) {
  if (g.genes.size() != cfg.genome_length()) {
    throw std::invalid_argument("genome has " + std::to_string(g.genes.size()) +
                                " genes, encoding expects " +
                                std::to_string(cfg.genome_length()));
  }
  const auto& v = g.genes;
  const double r = cfg.static_pos_range;
  std::array<Point, kStaticNodeCount> statics{};
  for (std::size_t s = 0; s < kStaticNodeCount; ++s) {
    statics[s] = {lerp_gene(v[2 * s], -r, r), lerp_gene(v[2 * s + 1], -r, r)};
  }
  Linkage linkage(statics, lerp_gene(v[kCrankLengthGene], cfg.crank_len_min, cfg.crank_len_max));

  for (std::size_t j = 0; j < cfg.n_joints; ++j) {
    const double* s = v.data() + kSectionSize * (j + 1);
    const double len = lerp_gene(s[slot::kLength], cfg.beam_len_min, cfg.beam_len_max);
    if (s[slot::kType] < kExtensionThreshold) {
      const std::size_t beam = index_gene(s[slot::kBeamOrNode], linkage.beams().size());
      const BeamEnd end = s[slot::kDirection] < 0.5 ? BeamEnd::A : BeamEnd::B;
      const double angle = s[slot::kAngle] * 2.0 * std::numbers::pi;
      linkage.add_extension(beam, end, angle, len);
    } else {
      const std::size_t nodes = linkage.node_count();
      const std::size_t a = index_gene(s[slot::kNode], nodes);
      std::size_t b = index_gene(s[slot::kBeamOrNode], nodes);
      if (a == b) b = (b + 1) % nodes;
      const Branch branch = s[slot::kDirection] < 0.5 ? Branch::Left : Branch::Right;
      const double len_b = lerp_gene(s[slot::kSecondLength], cfg.beam_len_min, cfg.beam_len_max);
      linkage.add_two_beam(a, b, branch, len, len_b);
    }
  }
  return linkage;
}

}  // namespace linkqd
