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

#include "linkqd/archive.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace linkqd {

using nlohmann::json;

json to_json(const EncodingConfig& cfg) {
  return {{"n_joints", cfg.n_joints},
          {"static_pos_range", cfg.static_pos_range},
          {"crank_len_range", {cfg.crank_len_min, cfg.crank_len_max}},
          {"beam_len_range", {cfg.beam_len_min, cfg.beam_len_max}}};
}

EncodingConfig encoding_from_json(const json& j) {
  EncodingConfig cfg;
  cfg.n_joints = j.value("n_joints", cfg.n_joints);
  cfg.static_pos_range = j.value("static_pos_range", cfg.static_pos_range);
  if (j.contains("crank_len_range")) {
    cfg.crank_len_min = j.at("crank_len_range").at(0).get<double>();
    cfg.crank_len_max = j.at("crank_len_range").at(1).get<double>();
  }
  if (j.contains("beam_len_range")) {
    cfg.beam_len_min = j.at("beam_len_range").at(0).get<double>();
    cfg.beam_len_max = j.at("beam_len_range").at(1).get<double>();
  }
  cfg.validate();
  return cfg;
}

json to_json(const GridSpec& grid) {
  json axes = json::array();
  for (const GridAxis& a : grid.axes) {
    axes.push_back({{"lower", a.lower}, {"upper", a.upper}, {"bins", a.bins}});
  }
  return {{"axes", axes}};
}

GridSpec grid_from_json(const json& j) {
  GridSpec grid;
  for (const json& a : j.at("axes")) {
    grid.axes.push_back({a.at("lower").get<double>(), a.at("upper").get<double>(),
                         a.at("bins").get<std::size_t>()});
  }
  grid.validate();
  return grid;
}

namespace {

json points_json(const std::vector<Point>& pts) {
  json arr = json::array();
  for (const Point& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point> points_from_json(const json& j) {
  std::vector<Point> pts;
  for (const json& p : j) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return pts;
}

}  // namespace

json to_json(const TargetPointSet& targets) {
  return {{"step", points_json(targets.step_points)}, {"lift", points_json(targets.lift_points)}};
}

TargetPointSet targets_from_json(const json& j) {
  TargetPointSet t{points_from_json(j.at("step")), points_from_json(j.at("lift"))};
  if (t.step_points.empty() || t.lift_points.empty()) {
    throw std::invalid_argument("target point sets must be non-empty");
  }
  return t;
}

json to_json(const Genome& g) { return {{"genes", g.genes}, {"sigma", g.sigma}}; }

Genome genome_from_json(const json& j) {
  Genome g;
  g.genes = j.at("genes").get<std::vector<double>>();
  g.sigma = j.value("sigma", kInitialSigma);
  for (double v : g.genes) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("genes must lie in [0, 1]");
  }
  if (!(g.sigma >= 0.0 && g.sigma <= 1.0)) throw std::invalid_argument("sigma must lie in [0, 1]");
  return g;
}

json to_json(const IterationMetrics& m) {
  json j{{"iteration", m.iteration},
         {"evaluations", m.evaluations},
         {"best_fitness", m.best_fitness},
         {"coverage", m.coverage},
         {"qd_score", m.qd_score}};
  if (m.front_size > 0) {
    j["front_size"] = m.front_size;
    j["hypervolume"] = m.hypervolume;
  }
  return j;
}

namespace {

json header_json(ArchiveKind kind, const RunInfo& info, const std::optional<GridSpec>& grid,
                 const std::optional<std::string>& checkpoint, std::size_t records) {
  json h;
  h["format"] = kArchiveFormat;
  h["version"] = kArchiveVersion;
  h["kind"] = kind == ArchiveKind::Repertoire ? "repertoire" : "population";
  h["algorithm"] = info.algorithm;
  h["fitness"] = std::string(to_string(info.fitness));
  h["space"] = info.space ? json(std::string(to_string(*info.space))) : json(nullptr);
  h["seed"] = info.seed;
  h["iterations"] = info.iterations;
  h["evaluations"] = info.evaluations;
  h["steps"] = info.steps;
  h["encoding"] = to_json(info.encoding);
  h["targets"] = to_json(info.targets);
  h["grid"] = grid ? to_json(*grid) : json(nullptr);
  h["aurora_checkpoint"] = checkpoint ? json(*checkpoint) : json(nullptr);
  h["records"] = records;
  return h;
}

json record_json(const char* slot_key, std::size_t slot, const Evaluation& e) {
  json r = to_json(e);
  r[slot_key] = slot;
  return r;
}

}  // namespace

json to_json(const Evaluation& e) {
  json r;
  r["genes"] = e.genome.genes;
  r["sigma"] = e.genome.sigma;
  r["fitness"] = e.fitness.scalar;
  r["objectives"] = e.fitness.objectives;
  r["descriptor"] = e.descriptor ? json(e.descriptor->values) : json(nullptr);
  r["error_count"] = e.error_count;
  r["summary"] = {{"width", e.summary.width},
                  {"height", e.summary.height},
                  {"lift", e.summary.lift},
                  {"step_length", e.summary.step_length}};
  return r;
}

void write_archive(std::ostream& out, const Repertoire& r,
                   const std::optional<std::string>& aurora_checkpoint) {
  out << header_json(ArchiveKind::Repertoire, r.info, r.grid, aurora_checkpoint, r.cells.size())
             .dump()
      << '\n';
  for (const auto& [cell, e] : r.cells) out << record_json("cell", cell, e).dump() << '\n';
}

void write_population(std::ostream& out, const RunInfo& info,
                      std::span<const Evaluation> population) {
  out << header_json(ArchiveKind::Population, info, std::nullopt, std::nullopt, population.size())
             .dump()
      << '\n';
  for (std::size_t i = 0; i < population.size(); ++i) {
    out << record_json("rank", i, population[i]).dump() << '\n';
  }
}

ArchiveFile read_archive(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("archive is empty");
  ArchiveFile file;
  try {
    const json h = json::parse(line);
    if (h.value("format", "") != kArchiveFormat) {
      throw std::runtime_error("not a linkqd archive");
    }
    if (h.at("version").get<int>() != kArchiveVersion) {
      throw std::runtime_error("unsupported archive version");
    }
    const std::string kind = h.at("kind").get<std::string>();
    if (kind == "repertoire") {
      file.kind = ArchiveKind::Repertoire;
    } else if (kind == "population") {
      file.kind = ArchiveKind::Population;
    } else {
      throw std::runtime_error("unknown archive kind '" + kind + "'");
    }
    RunInfo& info = file.info;
    info.algorithm = h.at("algorithm").get<std::string>();
    info.fitness = parse_fitness_kind(h.at("fitness").get<std::string>());
    if (!h.at("space").is_null()) {
      info.space = parse_descriptor_space(h.at("space").get<std::string>());
    } else {
      info.space.reset();
    }
    info.seed = h.at("seed").get<std::uint64_t>();
    info.iterations = h.at("iterations").get<std::size_t>();
    info.evaluations = h.at("evaluations").get<std::size_t>();
    info.steps = h.at("steps").get<std::size_t>();
    info.encoding = encoding_from_json(h.at("encoding"));
    info.targets = targets_from_json(h.at("targets"));
    if (!h.at("grid").is_null()) file.grid = grid_from_json(h.at("grid"));
    if (!h.at("aurora_checkpoint").is_null()) {
      file.aurora_checkpoint = h.at("aurora_checkpoint").get<std::string>();
    }
    if (file.kind == ArchiveKind::Repertoire && !file.grid) {
      throw std::runtime_error("repertoire archive without a grid");
    }

    const char* slot_key = file.kind == ArchiveKind::Repertoire ? "cell" : "rank";
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json r = json::parse(line);
      ArchiveRecord rec;
      rec.slot = r.at(slot_key).get<std::size_t>();
      Evaluation& e = rec.evaluation;
      e.genome.genes = r.at("genes").get<std::vector<double>>();
      e.genome.sigma = r.at("sigma").get<double>();
      if (e.genome.genes.size() != info.encoding.genome_length()) {
        throw std::runtime_error("record on line " + std::to_string(lineno) +
                                 " has the wrong genome length");
      }
      e.fitness.scalar = r.at("fitness").get<double>();
      e.fitness.objectives = r.at("objectives").get<std::array<double, 2>>();
      e.quality = quality(info.fitness, e.fitness.scalar);
      if (!r.at("descriptor").is_null()) {
        e.descriptor = Descriptor{r.at("descriptor").get<std::vector<double>>(),
                                  info.space.value_or(DescriptorSpace::WH)};
      }
      e.error_count = r.at("error_count").get<std::size_t>();
      const json& s = r.at("summary");
      e.summary = {s.at("width").get<double>(), s.at("height").get<double>(),
                   s.at("lift").get<double>(), s.at("step_length").get<double>()};
      if (file.grid && rec.slot >= file.grid->total_cells()) {
        throw std::runtime_error("record on line " + std::to_string(lineno) +
                                 " names a cell outside the grid");
      }
      file.records.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed archive: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("malformed archive: ") + e.what());
  }
  return file;
}

ArchiveFile load_archive(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open archive " + path.string());
  return read_archive(in);
}

Repertoire to_repertoire(const ArchiveFile& file) {
  if (file.kind != ArchiveKind::Repertoire) {
    throw std::invalid_argument("archive holds a population, not a repertoire");
  }
  Repertoire r;
  r.grid = *file.grid;
  r.info = file.info;
  for (const ArchiveRecord& rec : file.records) r.cells.emplace(rec.slot, rec.evaluation);
  return r;
}

void save_repertoire(const std::filesystem::path& path, const Repertoire& r,
                     const Autoencoder* ae) {
  std::optional<std::string> checkpoint;
  if (ae) {
    auto ae_path = path;
    ae_path.replace_filename(path.stem().string() + ".ae.json");
    std::ofstream ae_out(ae_path, std::ios::binary);
    if (!ae_out) throw std::runtime_error("cannot write " + ae_path.string());
    ae->save(ae_out);
    checkpoint = ae_path.filename().string();
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_archive(out, r, checkpoint);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["algorithm"] = std::string(to_string(cfg.algorithm));
  j["fitness"] = std::string(to_string(cfg.fitness));
  j["space"] = std::string(to_string(cfg.space));
  j["batch_size"] = cfg.batch_size;
  j["budget"] = cfg.budget;
  j["seed"] = cfg.seed;
  j["steps"] = cfg.steps;
  j["tournament_size"] = cfg.tournament_size;
  j["survivor_pool"] =
      cfg.survivor_pool == SurvivorPool::ParentsAndChildren ? "union" : "children";
  j["encoding"] = to_json(cfg.encoding);
  j["targets"] = to_json(cfg.targets);
  if (cfg.grid) j["grid"] = to_json(*cfg.grid);
  j["aurora"] = {{"initial_epochs", cfg.aurora.initial_epochs},
                 {"epochs", cfg.aurora.epochs},
                 {"period", cfg.aurora.period},
                 {"rebin", cfg.aurora.rebin},
                 {"learning_rate", cfg.aurora.train.learning_rate},
                 {"batch_size", cfg.aurora.train.batch_size}};
  if (cfg.qd_offset) j["qd_offset"] = *cfg.qd_offset;
  if (cfg.hv_reference) j["hv_reference"] = *cfg.hv_reference;
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("algorithm")) cfg.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  if (j.contains("fitness")) cfg.fitness = parse_fitness_kind(j.at("fitness").get<std::string>());
  if (j.contains("space")) cfg.space = parse_descriptor_space(j.at("space").get<std::string>());
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.budget = j.value("budget", cfg.budget);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.tournament_size = j.value("tournament_size", cfg.tournament_size);
  if (j.contains("survivor_pool")) {
    const auto pool = j.at("survivor_pool").get<std::string>();
    if (pool == "union") {
      cfg.survivor_pool = SurvivorPool::ParentsAndChildren;
    } else if (pool == "children") {
      cfg.survivor_pool = SurvivorPool::ChildrenOnly;
    } else {
      throw std::invalid_argument("survivor_pool must be 'union' or 'children'");
    }
  }
  if (j.contains("encoding")) cfg.encoding = encoding_from_json(j.at("encoding"));
  if (j.contains("targets")) cfg.targets = targets_from_json(j.at("targets"));
  if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
  if (j.contains("aurora")) {
    const json& a = j.at("aurora");
    cfg.aurora.initial_epochs = a.value("initial_epochs", cfg.aurora.initial_epochs);
    cfg.aurora.epochs = a.value("epochs", cfg.aurora.epochs);
    cfg.aurora.period = a.value("period", cfg.aurora.period);
    cfg.aurora.rebin = a.value("rebin", cfg.aurora.rebin);
    cfg.aurora.train.learning_rate = a.value("learning_rate", cfg.aurora.train.learning_rate);
    cfg.aurora.train.batch_size = a.value("batch_size", cfg.aurora.train.batch_size);
  }
  if (j.contains("qd_offset")) cfg.qd_offset = j.at("qd_offset").get<double>();
  if (j.contains("hv_reference")) cfg.hv_reference = j.at("hv_reference").get<Objectives>();
  cfg.validate();
  return cfg;
}

}  // namespace linkqd
