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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "linkqd/aurora.hpp"
#include "linkqd/genome.hpp"
#include "linkqd/log.hpp"
#include "oracles.hpp"

using namespace linkqd;

namespace {

double polyline_length(const std::vector<Point>& closed) {
  double sum = 0.0;
  for (std::size_t i = 0; i < closed.size(); ++i) sum += distance(closed[i], closed[(i + 1) % closed.size()]);
  return sum;
}

/// Random ellipse-like closed paths, varied enough to exercise the network.
std::vector<PathVector> random_paths(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PathVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 10.0 + 60.0 * u(rng);
    const double b = 5.0 + 40.0 * u(rng);
    const double tilt = std::numbers::pi * u(rng);
    const double wobble = 0.3 * u(rng);
    std::vector<Point> path;
    for (int k = 0; k < 72; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 72.0;
      const Point p{a * std::cos(t) * (1.0 + wobble * std::cos(3.0 * t)), b * std::sin(t)};
      path.push_back(rotate(p, tilt));
    }
    out.push_back(path_to_vector(path));
  }
  return out;
}

}  // namespace

TEST_CASE("architecture") {
  const Autoencoder ae(1);
  const std::vector<std::size_t> expected{80, 80, 64, 48, 32, 16, 4, 16, 32, 48, 64, 80, 80};
  CHECK(ae.layer_sizes() == expected);
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < expected.size(); ++i) count += expected[i] * expected[i + 1] + expected[i + 1];
  CHECK(ae.parameter_count() == count);
  CHECK(ae.parameters().size() == count);
}

TEST_CASE("path vectors: circle normalises to the unit circle") {
  for (Point centre : {Point{0, 0}, Point{250, -75}}) {
    const PathVector v = path_to_vector(oracle::circle(centre, 100.0, 3600, 0.7));
    REQUIRE(v.size() == kPathVectorSize);
    double cx = 0.0, cy = 0.0;
    for (std::size_t j = 0; j < kPathSamples; ++j) {
      CHECK(std::hypot(v[2 * j], v[2 * j + 1]) == doctest::Approx(1.0).epsilon(1e-5));
      cx += v[2 * j];
      cy += v[2 * j + 1];
    }
    CHECK(std::abs(cx) < 1e-9);
    CHECK(std::abs(cy) < 1e-9);
  }
}

TEST_CASE("path vectors: evenly spaced 40-point path is kept") {
  const auto path = oracle::circle({30.0, 40.0}, 50.0, kPathSamples);
  const PathVector v = path_to_vector(path);
  for (std::size_t j = 0; j < kPathSamples; ++j) {
    CHECK(v[2 * j] == doctest::Approx((path[j].x - 30.0) / 100.0));
    CHECK(v[2 * j + 1] == doctest::Approx((path[j].y - 40.0) / 100.0));
  }
}

TEST_CASE("path vectors: resampling preserves length") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> path;
    const double a = 20.0 + 80.0 * u(rng), b = 10.0 + 50.0 * u(rng);
    for (int k = 0; k < 72; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 72.0;
      path.push_back({a * std::cos(t), b * std::sin(t) + 5.0 * std::sin(2.0 * t)});
    }
    const PathVector v = path_to_vector(path);
    std::vector<Point> resampled;
    for (std::size_t j = 0; j < kPathSamples; ++j) resampled.push_back({100.0 * v[2 * j], 100.0 * v[2 * j + 1]});
    CHECK(std::abs(polyline_length(resampled) / polyline_length(path) - 1.0) < 0.02);
  }
}

TEST_CASE("path vectors need a full error-free turn") {
  const Linkage l({Point{100, 0}, Point{-80, 60}, Point{-60, -90}}, 30.0);
  const PathTrace ok = solve(l);
  CHECK(path_to_vector(ok));
  Linkage broken = l;
  broken.add_two_beam(kCrankTipNode, kFirstStaticNode, Branch::Left, 10.0, 10.0);
  CHECK_FALSE(path_to_vector(solve(broken)));
}

TEST_CASE("analytic gradient matches central differences") {
  Autoencoder ae(3);
  const auto batch = random_paths(5, 11);
  const std::vector<double> g = ae.gradient(batch);
  std::vector<double> p = ae.parameters();
  REQUIRE(g.size() == p.size());

  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
  const double h = 1e-6;
  double diff2 = 0.0, analytic2 = 0.0, numeric2 = 0.0;
  for (int i = 0; i < 400; ++i) {
    const std::size_t k = pick(rng);
    const double saved = p[k];
    p[k] = saved + h;
    ae.set_parameters(p);
    const double up = ae.loss(batch);
    p[k] = saved - h;
    ae.set_parameters(p);
    const double down = ae.loss(batch);
    p[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    diff2 += (numeric - g[k]) * (numeric - g[k]);
    analytic2 += g[k] * g[k];
    numeric2 += numeric * numeric;
  }
  const double worst = std::sqrt(diff2) / std::max(std::sqrt(analytic2), std::sqrt(numeric2));
  ae.set_parameters(p);
  CHECK(worst < 1e-4);
}

TEST_CASE("training on one repeated path converges") {
  Autoencoder ae(4);
  const auto one = random_paths(1, 5);
  const std::vector<PathVector> data(64, one[0]);
  TrainOptions opt;
  opt.epochs = 500;
  Rng rng(2);
  ae.train(data, opt, rng);
  CHECK(ae.loss(data) < 1e-2);
}

TEST_CASE("zero epochs change nothing; empty data changes nothing") {
  Autoencoder ae(5);
  const Autoencoder before = ae;
  TrainOptions opt;
  opt.epochs = 0;
  Rng rng(3);
  ae.train(random_paths(20, 1), opt, rng);
  CHECK(ae == before);
  opt.epochs = 10;
  ae.train({}, opt, rng);
  CHECK(ae == before);
}

TEST_CASE("encoding is deterministic and not collapsed") {
  Autoencoder ae(6);
  const auto data = random_paths(100, 9);
  TrainOptions opt;
  opt.epochs = 30;
  Rng rng(4);
  ae.train(data, opt, rng);
  CHECK(ae.encode(data[0]) == ae.encode(data[0]));
  const PathVector copy = data[3];
  CHECK(ae.encode(copy) == ae.encode(data[3]));
  bool differ = false;
  const Latent first = ae.encode(data[0]);
  for (const auto& v : data) differ = differ || ae.encode(v) != first;
  CHECK(differ);
}

TEST_CASE("checkpoint round trip") {
  Autoencoder ae(7);
  TrainOptions opt;
  opt.epochs = 3;
  Rng rng(5);
  ae.train(random_paths(30, 2), opt, rng);
  std::stringstream buf;
  ae.save(buf);
  const Autoencoder back = Autoencoder::load(buf);
  CHECK(back == ae);
  std::stringstream junk("{\"layers\": 3}");
  CHECK_THROWS_AS(Autoencoder::load(junk), std::runtime_error);
}

TEST_CASE("retraining schedule") {
  const AuroraConfig cfg;
  CHECK(retrain_due(0, cfg));
  CHECK_FALSE(retrain_due(7, cfg));
  CHECK(retrain_due(10, cfg));
  CHECK(retrain_due(20, cfg));
}

TEST_CASE("latent grid bounds") {
  const std::vector<Latent> z{{0.1, -0.2, 0.3, 0.0}, {0.5, 0.2, 0.3, -1.0}};
  const GridSpec g = latent_grid(z);
  REQUIRE(g.axes.size() == kLatentSize);
  CHECK(g.axes[0].lower == 0.1);
  CHECK(g.axes[0].upper == 0.5);
  CHECK(g.axes[2].lower == doctest::Approx(-0.2));  // degenerate axis widened
  CHECK(g.axes[2].upper == doctest::Approx(0.8));
  CHECK(g.total_cells() == 10000);
}

TEST_CASE("re-binning merges and is idempotent") {
  Autoencoder ae(8);
  const auto data = random_paths(300, 3);
  TrainOptions opt;
  opt.epochs = 20;
  Rng rng(6);
  ae.train(data, opt, rng);
  std::vector<Latent> latents;
  for (const auto& v : data) latents.push_back(ae.encode(v));
  const GridSpec grid = latent_grid(latents);

  Repertoire r;
  r.grid = grid;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Evaluation e;
    e.path_vector = data[i];
    e.quality = -static_cast<double>(i % 17);
    e.fitness.scalar = e.quality;
    const Latent z = ae.encode(e.path_vector);
    e.descriptor = Descriptor{{z.begin(), z.end()}, DescriptorSpace::AU};
    insert_elite(r, e);
  }
  const std::size_t before = r.size();
  const auto cells_before = r.cells;
  rebin(r, ae, grid);
  CHECK(r.size() <= before);
  CHECK(r.size() == before);
  for (const auto& [cell, e] : r.cells) {
    REQUIRE(cells_before.count(cell) == 1);
    CHECK(cells_before.at(cell).quality == e.quality);
  }

  // A coarser grid forces collisions.
  GridSpec coarse = grid;
  for (auto& a : coarse.axes) a.bins = 2;
  rebin(r, ae, coarse);
  CHECK(r.size() <= 16);
}

TEST_CASE("schedule skips empty training data with a warning") {
  std::vector<std::string> messages;
  const auto previous = set_log_sink([&](const std::string& m) { messages.push_back(m); });
  Repertoire r;
  r.grid = default_grid(DescriptorSpace::AU, {});
  Autoencoder ae(9);
  const Autoencoder before = ae;
  Rng rng(1);
  AuroraConfig cfg;
  CHECK_FALSE(aurora_schedule(r, ae, 0, cfg, {}, rng));
  CHECK(ae == before);
  CHECK(messages.size() == 1);
  set_log_sink(previous);
}

TEST_CASE("schedule trains and refreshes bounds") {
  Repertoire r;
  r.grid = default_grid(DescriptorSpace::AU, {});
  Autoencoder ae(10);
  const auto data = random_paths(50, 4);
  AuroraConfig cfg;
  cfg.initial_epochs = 5;
  Rng rng(2);
  CHECK(aurora_schedule(r, ae, 0, cfg, data, rng));
  std::vector<Latent> latents;
  for (const auto& v : data) latents.push_back(ae.encode(v));
  CHECK(r.grid == latent_grid(latents));
  CHECK_FALSE(aurora_schedule(r, ae, 3, cfg, data, rng));
}
