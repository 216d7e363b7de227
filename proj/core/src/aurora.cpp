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

#include "linkqd/aurora.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "linkqd/log.hpp"

namespace linkqd {

namespace {

using Matrix = Eigen::MatrixXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

Matrix to_matrix(std::span<const PathVector> batch) {
  Matrix x(kPathVectorSize, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t c = 0; c < batch.size(); ++c) {
    if (batch[c].size() != kPathVectorSize) {
      throw std::invalid_argument("path vector must have 80 components");
    }
    x.col(static_cast<Eigen::Index>(c)) = ConstVectorMap(batch[c].data(), kPathVectorSize);
  }
  return x;
}

}  // namespace

PathVector path_to_vector(std::span<const Point> path) {
  PathVector out(kPathVectorSize, 0.0);
  if (path.empty()) return out;
  const std::size_t n = path.size();
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    cumulative[i + 1] = cumulative[i] + distance(path[i], path[(i + 1) % n]);
  }
  const double perimeter = cumulative[n];

  std::array<Point, kPathSamples> samples{};
  std::size_t seg = 0;
  for (std::size_t j = 0; j < kPathSamples; ++j) {
    if (perimeter <= 0.0) {
      samples[j] = path[0];
      continue;
    }
    const double s = perimeter * static_cast<double>(j) / static_cast<double>(kPathSamples);
    while (seg + 1 < n && cumulative[seg + 1] <= s) ++seg;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double t = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
    const Point a = path[seg];
    const Point b = path[(seg + 1) % n];
    samples[j] = a + t * (b - a);
  }

  Point centroid{};
  for (const Point& p : samples) centroid = centroid + p;
  centroid = (1.0 / static_cast<double>(kPathSamples)) * centroid;
  for (std::size_t j = 0; j < kPathSamples; ++j) {
    const Point q = kPathVectorScale * (samples[j] - centroid);
    out[2 * j] = q.x;
    out[2 * j + 1] = q.y;
  }
  return out;
}

std::optional<PathVector> path_to_vector(const PathTrace& trace) {
  if (trace.error_count != 0 || trace.foot_path.empty()) return std::nullopt;
  return path_to_vector(std::span<const Point>(trace.foot_path));
}

Autoencoder::Autoencoder(std::uint64_t seed) {
  Rng rng = substream(seed, stream::kAurora, 0xae);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t l = 0; l + 1 < kAutoencoderLayout.size(); ++l) {
    Layer layer;
    layer.inputs = kAutoencoderLayout[l];
    layer.outputs = kAutoencoderLayout[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    layer.weights.resize(layer.inputs * layer.outputs);
    for (double& w : layer.weights) w = limit * unit(rng);
    layer.biases.assign(layer.outputs, 0.0);
    layers_.push_back(std::move(layer));
  }
}

std::vector<std::size_t> Autoencoder::layer_sizes() const {
  std::vector<std::size_t> sizes{layers_.front().inputs};
  for (const Layer& l : layers_) sizes.push_back(l.outputs);
  return sizes;
}

std::size_t Autoencoder::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

Latent Autoencoder::encode(std::span<const double> input) const {
  if (input.size() != kPathVectorSize) throw std::invalid_argument("encode expects 80 values");
  Eigen::VectorXd a = ConstVectorMap(input.data(), kPathVectorSize);
  for (std::size_t l = 0; l < kLatentLayer; ++l) {
    const Layer& layer = layers_[l];
    ConstMatrixMap w(layer.weights.data(), static_cast<Eigen::Index>(layer.outputs),
                     static_cast<Eigen::Index>(layer.inputs));
    ConstVectorMap b(layer.biases.data(), static_cast<Eigen::Index>(layer.outputs));
    a = (w * a + b).array().tanh().matrix();
  }
  Latent z{};
  for (std::size_t i = 0; i < kLatentSize; ++i) z[i] = a(static_cast<Eigen::Index>(i));
  return z;
}

std::vector<double> Autoencoder::reconstruct(std::span<const double> input) const {
  if (input.size() != kPathVectorSize) {
    throw std::invalid_argument("reconstruct expects 80 values");
  }
  Eigen::VectorXd a = ConstVectorMap(input.data(), kPathVectorSize);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    ConstMatrixMap w(layer.weights.data(), static_cast<Eigen::Index>(layer.outputs),
                     static_cast<Eigen::Index>(layer.inputs));
    ConstVectorMap b(layer.biases.data(), static_cast<Eigen::Index>(layer.outputs));
    a = w * a + b;
    if (l + 1 < layers_.size()) a = a.array().tanh().matrix();
  }
  return {a.data(), a.data() + a.size()};
}

double Autoencoder::loss(std::span<const PathVector> data) const {
  if (data.empty()) return 0.0;
  double sum = 0.0;
  for (const PathVector& x : data) {
    const auto y = reconstruct(x);
    for (std::size_t i = 0; i < kPathVectorSize; ++i) sum += std::abs(y[i] - x[i]);
  }
  return sum / static_cast<double>(data.size() * kPathVectorSize);
}

std::vector<double> Autoencoder::gradient(std::span<const PathVector> batch) const {
  std::vector<double> grad(parameter_count(), 0.0);
  if (batch.empty()) return grad;
  const Matrix x = to_matrix(batch);
  const auto cols = x.cols();

  std::vector<Matrix> activations{x};
  activations.reserve(layers_.size() + 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    ConstMatrixMap w(layer.weights.data(), static_cast<Eigen::Index>(layer.outputs),
                     static_cast<Eigen::Index>(layer.inputs));
    ConstVectorMap b(layer.biases.data(), static_cast<Eigen::Index>(layer.outputs));
    Matrix z = w * activations.back();
    z.colwise() += b;
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    activations.push_back(std::move(z));
  }

  // d MAE / d output: sign(y - x) / (components * samples).
  const double scale = 1.0 / static_cast<double>(kPathVectorSize * static_cast<std::size_t>(cols));
  Matrix delta = ((activations.back() - x).array().sign() * scale).matrix();

  std::vector<std::size_t> offsets(layers_.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offsets[l] = offset;
    offset += layers_[l].weights.size() + layers_[l].biases.size();
  }
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const auto rows = static_cast<Eigen::Index>(layer.outputs);
    const auto inputs = static_cast<Eigen::Index>(layer.inputs);
    MatrixMap gw(grad.data() + offsets[l], rows, inputs);
    VectorMap gb(grad.data() + offsets[l] + layer.weights.size(), rows);
    gw.noalias() = delta * activations[l].transpose();
    gb = delta.rowwise().sum();
    if (l == 0) break;
    ConstMatrixMap w(layer.weights.data(), rows, inputs);
    Matrix back = w.transpose() * delta;
    delta = (back.array() * (1.0 - activations[l].array().square())).matrix();
  }
  return grad;
}

std::vector<double> Autoencoder::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& l : layers_) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.biases.begin(), l.biases.end());
  }
  return flat;
}

void Autoencoder::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("parameter count mismatch");
  auto it = flat.begin();
  for (Layer& l : layers_) {
    std::copy_n(it, l.weights.size(), l.weights.begin());
    it += static_cast<std::ptrdiff_t>(l.weights.size());
    std::copy_n(it, l.biases.size(), l.biases.begin());
    it += static_cast<std::ptrdiff_t>(l.biases.size());
  }
}

void Autoencoder::train(std::span<const PathVector> data, const TrainOptions& options, Rng& rng) {
  if (data.empty() || options.epochs == 0) return;
  for (Layer& l : layers_) {
    if (l.weight_acc.empty()) {
      l.weight_acc.assign(l.weights.size(), options.initial_accumulator);
      l.bias_acc.assign(l.biases.size(), options.initial_accumulator);
    }
  }
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
  std::vector<std::size_t> order(data.size());
  std::vector<PathVector> batch;
  batch.reserve(batch_size);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + batch_size);
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      const std::vector<double> grad = gradient(batch);
      auto g = grad.begin();
      auto step = [&](std::vector<double>& params, std::vector<double>& acc) {
        for (std::size_t i = 0; i < params.size(); ++i, ++g) {
          acc[i] += *g * *g;
          params[i] -= options.learning_rate * *g / (std::sqrt(acc[i]) + options.epsilon);
        }
      };
      for (Layer& l : layers_) {
        step(l.weights, l.weight_acc);
        step(l.biases, l.bias_acc);
      }
    }
  }
}

void Autoencoder::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "linkqd-autoencoder";
  j["version"] = 1;
  j["layers"] = layer_sizes();
  auto& params = j["parameters"] = nlohmann::json::array();
  for (const Layer& l : layers_) {
    params.push_back({{"weights", l.weights},
                      {"biases", l.biases},
                      {"weight_acc", l.weight_acc},
                      {"bias_acc", l.bias_acc}});
  }
  out << j.dump() << '\n';
}

Autoencoder Autoencoder::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("autoencoder checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "linkqd-autoencoder") {
    throw std::runtime_error("autoencoder checkpoint: unexpected format tag");
  }
  Autoencoder ae;
  if (j.at("layers").get<std::vector<std::size_t>>() != ae.layer_sizes()) {
    throw std::runtime_error("autoencoder checkpoint: layer sizes do not match the architecture");
  }
  const auto& params = j.at("parameters");
  if (params.size() != ae.layers_.size()) {
    throw std::runtime_error("autoencoder checkpoint: wrong number of layers");
  }
  for (std::size_t i = 0; i < ae.layers_.size(); ++i) {
    Layer& l = ae.layers_[i];
    auto w = params[i].at("weights").get<std::vector<double>>();
    auto b = params[i].at("biases").get<std::vector<double>>();
    if (w.size() != l.weights.size() || b.size() != l.biases.size()) {
      throw std::runtime_error("autoencoder checkpoint: layer " + std::to_string(i) +
                               " has the wrong parameter count");
    }
    l.weights = std::move(w);
    l.biases = std::move(b);
    l.weight_acc = params[i].value("weight_acc", std::vector<double>{});
    l.bias_acc = params[i].value("bias_acc", std::vector<double>{});
  }
  return ae;
}

GridSpec latent_grid(std::span<const Latent> latents) {
  GridSpec grid;
  for (std::size_t d = 0; d < kLatentSize; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Latent& z : latents) {
      lo = std::min(lo, z[d]);
      hi = std::max(hi, z[d]);
    }
    if (latents.empty()) {
      lo = -1.0;
      hi = 1.0;
    } else if (!(hi - lo > 1e-12)) {
      lo -= 0.5;
      hi += 0.5;
    }
    grid.axes.push_back({lo, hi, 10});
  }
  return grid;
}

void rebin(Repertoire& archive, const Autoencoder& ae, const GridSpec& grid) {
  Repertoire fresh;
  fresh.grid = grid;
  fresh.info = archive.info;
  for (auto& [cell, elite] : archive.cells) {
    const Latent z = ae.encode(elite.path_vector);
    elite.descriptor = Descriptor{{z.begin(), z.end()}, DescriptorSpace::AU};
    insert_elite(fresh, std::move(elite));
  }
  archive = std::move(fresh);
}

bool aurora_schedule(Repertoire& archive, Autoencoder& ae, std::size_t iteration,
                     const AuroraConfig& cfg, std::span<const PathVector> bootstrap, Rng& rng) {
  if (!retrain_due(iteration, cfg)) return false;

  std::vector<PathVector> data;
  if (iteration == 0) {
    data.assign(bootstrap.begin(), bootstrap.end());
  } else {
    for (const auto& [cell, elite] : archive.cells) {
      if (elite.path_vector.size() == kPathVectorSize) data.push_back(elite.path_vector);
    }
  }
  if (data.empty()) {
    log_warning("aurora: no valid paths at iteration " + std::to_string(iteration) +
                ", skipping autoencoder training");
    return false;
  }

  TrainOptions options = cfg.train;
  options.epochs = iteration == 0 ? cfg.initial_epochs : cfg.epochs;
  ae.train(data, options, rng);

  std::vector<Latent> latents;
  latents.reserve(data.size());
  for (const PathVector& v : data) latents.push_back(ae.encode(v));
  const GridSpec grid = latent_grid(latents);
  if (cfg.rebin) {
    rebin(archive, ae, grid);
  } else {
    archive.grid = grid;
  }
  return true;
}

}  // namespace linkqd
