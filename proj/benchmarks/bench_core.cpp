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

#include <benchmark/benchmark.h>

#include <vector>

#include "linkqd/aurora.hpp"
#include "linkqd/evolve.hpp"
#include "linkqd/nsga2.hpp"

namespace {

using namespace linkqd;

std::vector<Genome> genomes(std::size_t n) {
  const EncodingConfig cfg;
  std::vector<Genome> out;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = substream(1, stream::kInit, 0, i);
    out.push_back(random_genome(rng, cfg));
  }
  return out;
}

void BM_Solve(benchmark::State& state) {
  const EncodingConfig cfg;
  std::vector<Linkage> linkages;
  for (const Genome& g : genomes(256)) linkages.push_back(decode(g, cfg));
  const auto steps = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(linkages[i++ % linkages.size()], steps));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Solve)->Arg(72)->Arg(360);

void BM_Evaluate(benchmark::State& state) {
  const auto gs = genomes(256);
  RunConfig cfg;
  cfg.fitness = state.range(0) == 0 ? FitnessKind::Fp : FitnessKind::Fsl;
  const EvalContext ctx = make_context(cfg);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(gs[i++ % gs.size()], ctx));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1);

void BM_NondominatedSort(benchmark::State& state) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Objectives> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {u(rng), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(nsga2_select(pts, pts.size() / 2));
}
BENCHMARK(BM_NondominatedSort)->Arg(1000)->Arg(10000);

void BM_AutoencoderEpoch(benchmark::State& state) {
  const EncodingConfig enc;
  std::vector<PathVector> data;
  for (std::uint64_t i = 0; data.size() < 1000; ++i) {
    Rng rng = substream(2, stream::kInit, 0, i);
    if (auto v = path_to_vector(solve(decode(random_genome(rng, enc), enc)))) data.push_back(*v);
  }
  Autoencoder ae(1);
  TrainOptions opt;
  opt.epochs = 1;
  Rng rng(4);
  for (auto _ : state) ae.train(data, opt, rng);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_AutoencoderEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
