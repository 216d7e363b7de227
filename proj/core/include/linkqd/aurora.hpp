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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "linkqd/geometry.hpp"
#include "linkqd/kinematics.hpp"
#include "linkqd/repertoire.hpp"
#include "linkqd/rng.hpp"

namespace linkqd {

inline constexpr std::size_t kPathSamples = 40;
inline constexpr std::size_t kPathVectorSize = 2 * kPathSamples;
inline constexpr std::size_t kLatentSize = 4;
inline constexpr double kPathVectorScale = 1.0 / 100.0;

/// Unit counts from input to output. Every layer but the last uses tanh; the
/// 4-unit layer is the latent code.
inline constexpr std::array<std::size_t, 13> kAutoencoderLayout = {
    kPathVectorSize, 80, 64, 48, 32, 16, kLatentSize, 16, 32, 48, 64, 80, kPathVectorSize};
inline constexpr std::size_t kLatentLayer = 6;

using PathVector = std::vector<double>;
using Latent = std::array<double, kLatentSize>;

/// Resamples a closed foot path to 40 points equally spaced in arc length
/// (starting at the first point), centres it on its centroid, scales by 1/100
/// and interleaves x, y.
PathVector path_to_vector(std::span<const Point> closed_path);
/// nullopt unless the trace has a complete, error-free rotation.
std::optional<PathVector> path_to_vector(const PathTrace& trace);

struct TrainOptions {
  std::size_t epochs = 1000;
  double learning_rate = 0.01;
  std::size_t batch_size = 256;
  double initial_accumulator = 0.1;
  double epsilon = 1e-7;
};

/// Fully connected tanh autoencoder trained with Adagrad on mean absolute
/// reconstruction error.
class Autoencoder {
 public:
  /// Glorot-uniform weights, zero biases.
  explicit Autoencoder(std::uint64_t seed = 0);

  [[nodiscard]] std::vector<std::size_t> layer_sizes() const;
  [[nodiscard]] std::size_t parameter_count() const;

  [[nodiscard]] Latent encode(std::span<const double> input) const;
  [[nodiscard]] std::vector<double> reconstruct(std::span<const double> input) const;

  /// Mean absolute error over every component of every sample.
  [[nodiscard]] double loss(std::span<const PathVector> data) const;
  /// d loss / d parameters, flattened layer by layer (weights column-major,
  /// then biases).
  [[nodiscard]] std::vector<double> gradient(std::span<const PathVector> batch) const;

  [[nodiscard]] std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  /// Minibatch Adagrad; batch order is reshuffled from `rng` every epoch.
  /// Does nothing on empty data.
  void train(std::span<const PathVector> data, const TrainOptions& options, Rng& rng);

  /// Checkpoint: a header of layer sizes, then per layer the flat weights and
  /// biases. Adagrad accumulators are included so training can resume.
  void save(std::ostream& out) const;
  /// Throws std::runtime_error on a malformed checkpoint or layout mismatch.
  static Autoencoder load(std::istream& in);

  friend bool operator==(const Autoencoder&, const Autoencoder&) = default;

 private:
  struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, column-major
    std::vector<double> biases;
    std::vector<double> weight_acc;
    std::vector<double> bias_acc;

    friend bool operator==(const Layer&, const Layer&) = default;
  };

  std::vector<Layer> layers_;
};

struct AuroraConfig {
  std::size_t initial_epochs = 3000;
  std::size_t epochs = 1000;
  std::size_t period = 10;
  /// Re-insert every elite after retraining; otherwise only new candidates
  /// see the new encoder.
  bool rebin = true;
  TrainOptions train;
};

/// Grid over latent space bounded by the per-dimension min/max of `latents`,
/// 10 bins per dimension.
GridSpec latent_grid(std::span<const Latent> latents);

/// Encodes every elite and re-inserts it into a fresh archive over `grid`, in
/// ascending old cell order (collisions keep the better elite).
void rebin(Repertoire& archive, const Autoencoder& ae, const GridSpec& grid);

[[nodiscard]] constexpr bool retrain_due(std::size_t iteration, const AuroraConfig& cfg) {
  return iteration == 0 || (cfg.period != 0 && iteration % cfg.period == 0);
}

/// One step of the online schedule. Iteration 0 trains `initial_epochs` on
/// `bootstrap`; later multiples of `period` train `epochs` on the archive's
/// elites. After training, latent bounds are refreshed from the training set
/// and the archive is re-binned (or just re-gridded when rebin is off).
/// Returns true when training happened; an empty training set is skipped with
/// a warning.
bool aurora_schedule(Repertoire& archive, Autoencoder& ae, std::size_t iteration,
                     const AuroraConfig& cfg, std::span<const PathVector> bootstrap, Rng& rng);

}  // namespace linkqd
