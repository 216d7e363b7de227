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

#include "linkqd/fitness.hpp"
#include "linkqd/genome.hpp"
#include "oracles.hpp"

using namespace linkqd;

namespace {

/// Trace whose foot path is `path`, with no other information.
PathTrace trace_of(const std::vector<Point>& path, std::size_t errors = 0) {
  PathTrace t(std::max<std::size_t>(path.size() + errors, 3), kFirstJointNode);
  t.foot_path = path;
  t.error_count = errors;
  return t;
}

std::vector<Point> random_path(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-150.0, 150.0);
  std::vector<Point> out(n);
  for (Point& p : out) p = {u(rng), u(rng)};
  return out;
}

}  // namespace

TEST_CASE("default target points form a lying D") {
  const TargetPointSet t = default_target_points();
  REQUIRE(t.step_points.size() == 10);
  REQUIRE(t.lift_points.size() == 5);
  CHECK(t.size() == 15);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(t.step_points[i].x == doctest::Approx(60.0 * static_cast<double>(i) / 9.0));
    CHECK(t.step_points[i].y == 0.0);
  }
  CHECK(t.step_points[1].x == doctest::Approx(6.6667).epsilon(1e-4));
  for (const Point& p : t.lift_points) {
    CHECK(p.y > 0.0);
    CHECK(p.y <= 20.0 + 1e-12);
  }
  // Mirror symmetry about x = 30.
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t.lift_points[i].x + t.lift_points[4 - i].x == doctest::Approx(60.0));
    CHECK(t.lift_points[i].y == doctest::Approx(t.lift_points[4 - i].y));
  }
  TargetShape flat;
  flat.height = 0.0;
  for (const Point& p : default_target_points(flat).lift_points) CHECK(p.y == doctest::Approx(0.0));
}

TEST_CASE("target points parse from text") {
  std::istringstream in("# custom\n0 0 step\n10 0 step\n\n5 4 lift\n");
  const TargetPointSet t = read_target_points(in);
  CHECK(t.step_points.size() == 2);
  CHECK(t.lift_points.size() == 1);
  CHECK(t.lift_points[0] == Point{5.0, 4.0});
  std::istringstream bad("0 0 stride\n");
  CHECK_THROWS_AS(read_target_points(bad), std::runtime_error);
  std::istringstream one_sided("0 0 step\n");
  CHECK_THROWS_AS(read_target_points(one_sided), std::runtime_error);
}

TEST_CASE("F_p is zero on a path through every target") {
  const TargetPointSet targets = default_target_points();
  std::vector<Point> path = targets.step_points;
  path.insert(path.end(), targets.lift_points.begin(), targets.lift_points.end());
  path.push_back({200.0, 200.0});
  CHECK(fitness_fp(trace_of(path), targets) == 0.0);
  const auto mo = fitness_fp_mo(trace_of(path), targets);
  CHECK(mo[0] == 0.0);
  CHECK(mo[1] == 0.0);
  // Touching only the step points leaves the lift objective negative.
  const auto step_only = fitness_fp_mo(trace_of(targets.step_points), targets);
  CHECK(step_only[0] == 0.0);
  CHECK(step_only[1] < 0.0);
}

TEST_CASE("F_p for a point equidistant from 15 targets") {
  TargetPointSet targets;
  for (int i = 0; i < 15; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 15.0;
    (i < 10 ? targets.step_points : targets.lift_points).push_back({5.0 * std::cos(a), 5.0 * std::sin(a)});
  }
  CHECK(fitness_fp(trace_of({{0.0, 0.0}}), targets) == doctest::Approx(-75.0));
}

TEST_CASE("F_p matches a brute-force nearest scan") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(1, 200);
  for (int trial = 0; trial < 500; ++trial) {
    const auto path = random_path(rng, len(rng));
    TargetPointSet targets;
    targets.step_points = random_path(rng, 10);
    targets.lift_points = random_path(rng, 5);
    std::uniform_int_distribution<std::size_t> err(0, 5);
    const std::size_t errors = err(rng);
    double expected = -static_cast<double>(errors);
    for (const Point& p : targets.step_points) expected -= oracle::nearest_distance(p, path);
    for (const Point& p : targets.lift_points) expected -= oracle::nearest_distance(p, path);
    const PathTrace t = trace_of(path, errors);
    CHECK(std::abs(fitness_fp(t, targets) - expected) <= 1e-12);
    for (const Point& p : targets.step_points) {
      CHECK(nearest_distance(p, path) == oracle::nearest_distance(p, path));
    }
    // Objectives each carry the error term once; the scalar carries it once.
    const auto mo = fitness_fp_mo(t, targets);
    CHECK(mo[0] + mo[1] + static_cast<double>(errors) ==
          doctest::Approx(fitness_fp(t, targets)).epsilon(1e-12));
  }
}

TEST_CASE("F_p invariances") {
  std::mt19937_64 rng(77);
  const TargetPointSet targets = default_target_points();
  for (int trial = 0; trial < 50; ++trial) {
    const auto path = random_path(rng, 40);
    const double base = fitness_fp(trace_of(path), targets);
    CHECK(base <= 0.0);
    // Translate path and targets together.
    const Point shift{13.5, -42.25};
    auto moved_path = path;
    for (Point& p : moved_path) p = p + shift;
    TargetPointSet moved = targets;
    for (Point& p : moved.step_points) p = p + shift;
    for (Point& p : moved.lift_points) p = p + shift;
    CHECK(fitness_fp(trace_of(moved_path), moved) == doctest::Approx(base).epsilon(1e-12));
    // Scale both by c: the distance term scales by c.
    auto scaled_path = path;
    for (Point& p : scaled_path) p = 2.5 * p;
    TargetPointSet scaled = targets;
    for (Point& p : scaled.step_points) p = 2.5 * p;
    for (Point& p : scaled.lift_points) p = 2.5 * p;
    CHECK(fitness_fp(trace_of(scaled_path), scaled) == doctest::Approx(2.5 * base).epsilon(1e-12));
  }
}

TEST_CASE("empty path ranks worst") {
  const TargetPointSet targets = default_target_points();
  const PathTrace t = trace_of({}, 72);
  CHECK(fitness_fp(t, targets) == doctest::Approx(-15e6 - 72.0));
  CHECK(fitness_fsl(t) == doctest::Approx(72.0));
}

TEST_CASE("rectangle 40 x 20: step, lift and F_sl") {
  const auto rect = oracle::rectangle(40.0, 20.0, 1.0);
  const PathTrace t = trace_of(rect);
  CHECK(step_length(t) == doctest::Approx(40.0));
  CHECK(lift(t) == doctest::Approx(20.0));
  CHECK(angle_error(t) == 0);
  CHECK(fitness_fsl(t) == doctest::Approx(-36.0));
  const auto mo = fitness_fsl_mo(t);
  CHECK(mo[0] == doctest::Approx(-40.0));
  CHECK(mo[1] == doctest::Approx(-20.0));
  CHECK(0.8 * mo[0] + 0.2 * mo[1] == doctest::Approx(fitness_fsl(t)));

  // Any starting point gives the same answer on a closed path.
  for (std::size_t shift = 1; shift < rect.size(); shift += 7) {
    std::vector<Point> rotated(rect.begin() + static_cast<long>(shift), rect.end());
    rotated.insert(rotated.end(), rect.begin(), rect.begin() + static_cast<long>(shift));
    const PathTrace r = trace_of(rotated);
    CHECK(step_length(r) == doctest::Approx(40.0));
    CHECK(lift(r) == doctest::Approx(20.0));
  }
}

TEST_CASE("doubling the step length shifts F_sl linearly") {
  const PathTrace a = trace_of(oracle::rectangle(40.0, 20.0));
  const PathTrace b = trace_of(oracle::rectangle(80.0, 20.0));
  CHECK(fitness_fsl(b) - fitness_fsl(a) == doctest::Approx(-0.8 * 40.0));
}

TEST_CASE("circle: step length and lift match the arc formulas") {
  const double r = 100.0;
  const std::size_t n = 36000;
  const PathTrace t = trace_of(oracle::circle({0.0, 0.0}, r, n, 0.3));
  // Band y <= -r + 5 on the lower half: arc of half-angle acos(1 - 5/r).
  const double arc = 2.0 * r * std::acos(1.0 - kStepBand / r);
  const double spacing = 2.0 * std::numbers::pi * r / static_cast<double>(n);
  CHECK(std::abs(step_length(t) - arc) < 2.0 * spacing);
  CHECK(std::abs(lift(t) - 2.0 * r) < spacing);
}

TEST_CASE("degenerate motions") {
  std::vector<Point> vertical;
  for (int i = 0; i < 20; ++i) vertical.push_back({0.0, static_cast<double>(i < 10 ? i : 20 - i)});
  CHECK(step_length(trace_of(vertical)) == 0.0);
  std::vector<Point> monotone;
  for (int i = 0; i < 20; ++i) monotone.push_back({static_cast<double>(i), std::sin(i * 0.4)});
  CHECK(lift(trace_of(monotone, 1)) == 0.0);
  CHECK(step_length(trace_of({{1.0, 1.0}})) == 0.0);
  CHECK(step_and_lift({}, true).step_length == 0.0);
}

TEST_CASE("angle error counts steps with a node below the foot") {
  PathTrace t(72, 6);
  t.set_moving(kCrankTipNode, true);
  t.set_moving(5, true);
  t.foot_index = 5;
  for (std::size_t k = 0; k < 72; ++k) {
    t.set_feasible(k, true);
    t.place(k, kMotorNode, {0.0, -50.0});  // static, ignored
    t.place(k, 1, {0.0, -50.0});
    t.place(k, 2, {0.0, -50.0});
    t.place(k, 3, {0.0, -50.0});
    t.place(k, 5, {0.0, 0.0});
    t.place(k, kCrankTipNode, {1.0, (k >= 20 && k < 30) ? -1.0 : 1.0});
    t.foot_path.push_back({0.0, 0.0});
  }
  CHECK(angle_error(t) == 10);
  CHECK(fitness_fsl_mo(t)[0] == doctest::Approx(10.0));

  t.set_feasible(25, false);
  CHECK(angle_error(t) == 9);
}

TEST_CASE("angle error on solved linkages stays in range") {
  const EncodingConfig cfg;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng = substream(3, stream::kInit, 0, i);
    const Linkage l = decode(random_genome(rng, cfg), cfg);
    const PathTrace t = solve(l, 72);
    CHECK(angle_error(t) <= 72);
    CHECK(t.error_count <= 72);
    if (l.moving_count() == 1) CHECK(angle_error(t) == 0);
    CHECK(step_length(t) >= 0.0);
    CHECK(lift(t) >= 0.0);
    CHECK(std::isfinite(fitness_fp(t, default_target_points())));
  }
  const Linkage crank_only({Point{50, 0}, Point{0, 50}, Point{-50, 0}}, 25.0);
  CHECK(angle_error(solve(crank_only)) == 0);
}

TEST_CASE("F_ae = 3 with no motion gives (3, 3)") {
  PathTrace t(3, 6);
  t.set_moving(kCrankTipNode, true);
  t.set_moving(5, true);
  t.foot_index = 5;
  for (std::size_t k = 0; k < 3; ++k) {
    t.set_feasible(k, true);
    for (std::size_t n = 0; n < 4; ++n) t.place(k, n, {0.0, 0.0});
    t.place(k, 5, {0.0, 0.0});
    t.place(k, kCrankTipNode, {0.0, -1.0});
    t.foot_path.push_back({0.0, 0.0});
  }
  const auto mo = fitness_fsl_mo(t);
  CHECK(mo[0] == doctest::Approx(3.0));
  CHECK(mo[1] == doctest::Approx(3.0));
}

TEST_CASE("fitness kinds and orientation") {
  CHECK(parse_fitness_kind("fp") == FitnessKind::Fp);
  CHECK(parse_fitness_kind("fsl") == FitnessKind::Fsl);
  CHECK_THROWS_AS(parse_fitness_kind("fx"), std::invalid_argument);
  CHECK(quality(FitnessKind::Fp, -3.0) == -3.0);
  CHECK(quality(FitnessKind::Fsl, -3.0) == 3.0);
  const PathTrace t = trace_of(oracle::rectangle(40.0, 20.0));
  const FitnessValue v = evaluate_fitness(FitnessKind::Fsl, t, default_target_points());
  CHECK(v.scalar == doctest::Approx(-36.0));
  CHECK(v.objectives[0] == doctest::Approx(-40.0));
}
