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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "linkqd/archive.hpp"
#include "linkqd/buildsheet.hpp"
#include "linkqd/downsample.hpp"
#include "linkqd/evolve.hpp"
#include "linkqd/http_server.hpp"
#include "linkqd/render.hpp"
#include "linkqd/service.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace linkqd;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

fs::path metrics_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + ".metrics.jsonl");
  return p;
}

/// Comma separated unsigned integers.
std::vector<std::size_t> parse_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad index list '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty index list");
  return out;
}

struct EvolveArgs {
  std::string config;
  std::string algo;
  std::string fitness;
  std::string space;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> batch;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> steps;
  std::string targets;
  std::string out;
  std::string metrics;
  bool quiet = false;
};

int cmd_evolve(const EvolveArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : run_config_from_json(read_json_file(a.config));
  if (!a.algo.empty()) cfg.algorithm = parse_algorithm(a.algo);
  if (!a.fitness.empty()) cfg.fitness = parse_fitness_kind(a.fitness);
  if (!a.space.empty()) cfg.space = parse_descriptor_space(a.space);
  if (a.budget) cfg.budget = *a.budget;
  if (a.batch) cfg.batch_size = *a.batch;
  if (a.seed) cfg.seed = *a.seed;
  if (a.steps) cfg.steps = *a.steps;
  if (!a.targets.empty()) {
    std::ifstream in(a.targets);
    if (!in) throw std::runtime_error("cannot open " + a.targets);
    cfg.targets = read_target_points(in);
  }
  cfg.validate();

  const fs::path out_path = a.out;
  const fs::path metrics_path = a.metrics.empty() ? metrics_path_for(out_path) : fs::path(a.metrics);
  std::ofstream metrics(metrics_path, std::ios::binary);
  if (!metrics) throw std::runtime_error("cannot write " + metrics_path.string());
  metrics << json{{"config", to_json(cfg)}}.dump() << '\n';

  RunObserver observer;
  observer.on_metrics = [&](const IterationMetrics& m) {
    metrics << to_json(m).dump() << '\n';
    metrics.flush();
    if (!a.quiet) {
      std::fprintf(stderr, "iter %4zu  evals %7zu  best %.4f", m.iteration, m.evaluations,
                   m.best_fitness);
      if (cfg.algorithm == Algorithm::MapElites) {
        std::fprintf(stderr, "  coverage %.4f  qd %.1f", m.coverage, m.qd_score);
      }
      std::fprintf(stderr, "\n");
    }
  };

  if (cfg.algorithm == Algorithm::MapElites) {
    const MapElitesResult result = run_map_elites(cfg, observer);
    save_repertoire(out_path, result.archive,
                    result.autoencoder ? &*result.autoencoder : nullptr);
    if (!a.quiet) {
      std::fprintf(stderr, "wrote %zu elites to %s\n", result.archive.size(), out_path.c_str());
    }
  } else {
    const PopulationResult result =
        cfg.algorithm == Algorithm::EA ? run_ea(cfg, observer) : run_nsga2(cfg, observer);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path.string());
    write_population(out, result.info, result.population);
    if (!a.quiet) {
      std::fprintf(stderr, "wrote %zu individuals to %s\n", result.population.size(),
                   out_path.c_str());
    }
  }
  return 0;
}

int cmd_simulate(const std::string& genome_file, std::optional<std::size_t> steps,
                 const std::string& svg, const std::string& fitness) {
  const json j = read_json_file(genome_file);
  EvalContext ctx;
  ctx.steps = steps.value_or(j.value("steps", kDefaultSteps));
  if (j.contains("encoding")) ctx.encoding = encoding_from_json(j.at("encoding"));
  if (j.contains("targets")) ctx.targets = targets_from_json(j.at("targets"));
  if (!fitness.empty()) ctx.fitness = parse_fitness_kind(fitness);
  ctx.encoding.validate();
  const Genome genome = genome_from_json(j.contains("genome") ? j.at("genome") : j);
  if (genome.genes.size() != ctx.encoding.genome_length()) {
    throw std::invalid_argument("genome has " + std::to_string(genome.genes.size()) +
                                " genes, encoding expects " +
                                std::to_string(ctx.encoding.genome_length()));
  }

  const Linkage linkage = decode(genome, ctx.encoding);
  const PathTrace trace = solve(linkage, ctx.steps);
  const Evaluation e = evaluate(genome, linkage, trace, ctx);
  json report = {{"steps", ctx.steps},
                 {"nodes", linkage.node_count()},
                 {"beams", linkage.beams().size()},
                 {"foot", trace.foot_index},
                 {"error_count", trace.error_count},
                 {"fp", fitness_fp(trace, ctx.targets)},
                 {"fsl", fitness_fsl(trace)},
                 {"width", e.summary.width},
                 {"height", e.summary.height},
                 {"step_length", e.summary.step_length},
                 {"lift", e.summary.lift}};
  std::cout << report.dump(2) << '\n';
  if (!svg.empty()) write_text(svg, render_linkage(linkage, trace));
  return 0;
}

int cmd_map_render(const std::string& archive, const std::string& mode,
                   std::optional<std::size_t> rows, std::optional<std::size_t> cols,
                   const std::string& dims_text, const std::string& out) {
  const Repertoire r = to_repertoire(load_archive(archive));
  const auto d = parse_list(dims_text);
  if (d.size() != 2) throw std::invalid_argument("--dims takes two grid dimensions, e.g. 0,1");
  const std::array<std::size_t, 2> dims{d[0], d[1]};
  if (dims[0] >= r.grid.axes.size() || dims[1] >= r.grid.axes.size()) {
    throw std::invalid_argument("--dims out of range for a " +
                                std::to_string(r.grid.axes.size()) + "-dimensional grid");
  }
  const std::size_t c = cols.value_or(r.grid.axes[dims[0]].bins);
  const std::size_t rw = rows.value_or(r.grid.axes[dims[1]].bins);
  const DownsampledMap map = downsample(r, rw, c, dims);
  RenderOptions options;
  if (!rows && !cols) {
    // Full-resolution maps get small cells.
    options.cell_size = 8.0;
    options.padding = 1.0;
  }
  write_text(out, render_map(map, parse_map_style(mode), options));
  return 0;
}

int cmd_buildsheet(const std::string& archive, const std::string& cell_text, double pitch,
                   bool as_json) {
  const Repertoire r = to_repertoire(load_archive(archive));
  const auto coords = parse_list(cell_text);
  std::size_t index = 0;
  if (coords.size() == 1) {
    index = coords[0];
  } else if (coords.size() == r.grid.axes.size()) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] >= r.grid.axes[i].bins) throw std::invalid_argument("--cell coordinate out of range");
    }
    index = r.grid.cell_index(coords);
  } else {
    throw std::invalid_argument("--cell takes a flat index or one coordinate per grid dimension");
  }
  const auto it = r.cells.find(index);
  if (it == r.cells.end()) throw std::invalid_argument("cell " + cell_text + " holds no elite");
  const BuildSheet sheet = build_sheet(it->second.genome, r.info, pitch);
  if (as_json) {
    std::cout << to_json(sheet).dump(2) << '\n';
  } else {
    std::cout << format_build_sheet(sheet);
  }
  return sheet.snapped_fails() ? 3 : 0;
}

int cmd_serve(const std::string& dir, const std::string& host, int port) {
  const RepertoireService service(dir);
  HttpServer server(service);
  const int bound = server.bind(host, port);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  std::fprintf(stderr, "serving %s on http://%s:%d\n", dir.c_str(), host.c_str(), bound);
  return server.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolve, inspect and serve planar leg-linkage repertoires"};
  app.require_subcommand(1);

  EvolveArgs ev;
  auto* evolve = app.add_subcommand("evolve", "Run EA, NSGA-II or MAP-Elites and save the result");
  evolve->add_option("--config", ev.config, "JSON run configuration (flags override it)");
  evolve->add_option("--algo", ev.algo, "ea | nsga2 | me");
  evolve->add_option("--fitness", ev.fitness, "fp | fsl");
  evolve->add_option("--space", ev.space, "wh | lis | st | au (MAP-Elites only)");
  evolve->add_option("--budget", ev.budget, "Total evaluations, initial batch included");
  evolve->add_option("--batch", ev.batch, "Batch / population size");
  evolve->add_option("--seed", ev.seed, "Master seed");
  evolve->add_option("--steps", ev.steps, "Crank steps per revolution");
  evolve->add_option("--targets", ev.targets, "Target point file: rows of 'x y step|lift'");
  evolve->add_option("--out", ev.out, "Archive file (.jsonl)")->required();
  evolve->add_option("--metrics", ev.metrics, "Per-iteration metrics (default <out>.metrics.jsonl)");
  evolve->add_flag("--quiet", ev.quiet, "No progress on stderr");

  std::string genome_file, svg_file, sim_fitness;
  std::optional<std::size_t> sim_steps;
  auto* simulate = app.add_subcommand("simulate", "Simulate one genome");
  simulate->add_option("--genome", genome_file, "JSON with genes (and optional encoding)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--steps", sim_steps, "Crank steps per revolution");
  simulate->add_option("--fitness", sim_fitness, "fp | fsl");
  simulate->add_option("--svg", svg_file, "Write a drawing of the linkage");

  auto* map = app.add_subcommand("map", "Repertoire maps");
  map->require_subcommand(1);
  std::string map_archive, map_mode = "heatmap", map_dims = "0,1", map_out = "-";
  std::optional<std::size_t> map_rows, map_cols;
  auto* render = map->add_subcommand("render", "Render a repertoire as SVG");
  render->add_option("--archive", map_archive, "Repertoire archive")->required()->check(CLI::ExistingFile);
  render->add_option("--mode", map_mode, "heatmap | paths")->capture_default_str();
  render->add_option("--rows", map_rows, "Display rows (default: full resolution)");
  render->add_option("--cols", map_cols, "Display columns (default: full resolution)");
  render->add_option("--dims", map_dims, "Grid dimensions shown as columns,rows")->capture_default_str();
  render->add_option("--out", map_out, "SVG output file, - for stdout")->capture_default_str();

  std::string bs_archive, bs_cell;
  double bs_pitch = kDefaultPitch;
  bool bs_json = false;
  auto* buildsheet = app.add_subcommand("buildsheet", "Parts list with beams snapped to the hole pitch");
  buildsheet->add_option("--archive", bs_archive, "Repertoire archive")->required()->check(CLI::ExistingFile);
  buildsheet->add_option("--cell", bs_cell, "Grid coordinates I,J,... or a flat cell index")->required();
  buildsheet->add_option("--pitch", bs_pitch, "Hole pitch in mm")->capture_default_str();
  buildsheet->add_flag("--json", bs_json, "Print JSON instead of a table");

  std::string serve_dir, serve_host = "127.0.0.1";
  int serve_port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve a directory of archives over HTTP");
  serve->add_option("--archive-dir", serve_dir, "Directory of .jsonl archives")
      ->required()
      ->check(CLI::ExistingDirectory);
  serve->add_option("--port", serve_port, "TCP port")->capture_default_str();
  serve->add_option("--host", serve_host, "Bind address")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve) return cmd_evolve(ev);
    if (*simulate) return cmd_simulate(genome_file, sim_steps, svg_file, sim_fitness);
    if (*render) return cmd_map_render(map_archive, map_mode, map_rows, map_cols, map_dims, map_out);
    if (*buildsheet) return cmd_buildsheet(bs_archive, bs_cell, bs_pitch, bs_json);
    if (*serve) return cmd_serve(serve_dir, serve_host, serve_port);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "linkqd: %s\n", e.what());
    return 1;
  }
  return 0;
}
