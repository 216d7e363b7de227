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

#include "linkqd/service.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <fstream>
#include <mutex>
#include <numbers>
#include <system_error>

#include "linkqd/buildsheet.hpp"
#include "linkqd/downsample.hpp"
#include "linkqd/log.hpp"

namespace linkqd {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RepertoireService::Loaded {
  std::string id;
  fs::file_time_type mtime;
  ArchiveFile file;
  std::optional<Repertoire> repertoire;
  std::optional<Autoencoder> autoencoder;
};

namespace {

constexpr std::string_view kArchiveExtension = ".jsonl";
constexpr std::string_view kMetricsSuffix = ".metrics.jsonl";

bool is_archive_name(const std::string& name) {
  return name.size() > kArchiveExtension.size() && name.ends_with(kArchiveExtension) &&
         !name.ends_with(kMetricsSuffix);
}

bool valid_id(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

ServiceError invalid(const std::string& message) {
  return ServiceError(400, "invalid_request", message);
}

/// Non-negative integer from a JSON number, whether stored signed or unsigned.
std::optional<std::size_t> as_index(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::size_t>(j.get<std::int64_t>());
  }
  return std::nullopt;
}

json point_json(const Point& p) { return json::array({p.x, p.y}); }

json path_json(const std::vector<Point>& path) {
  json out = json::array();
  for (const Point& p : path) out.push_back(point_json(p));
  return out;
}

json summary_json(const PathSummary& s) {
  return {{"width", s.width},
          {"height", s.height},
          {"lift", s.lift},
          {"step_length", s.step_length}};
}

std::string node_kind(std::size_t node) {
  if (node == kMotorNode) return "motor";
  if (node < kCrankTipNode) return "static";
  if (node == kCrankTipNode) return "crank";
  return "joint";
}

std::size_t index_from_key(const std::string& key) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != key.size()) throw invalid("override key '" + key + "' is not a beam index");
  return static_cast<std::size_t>(v);
}

/// Beam index -> length, from either {"3": 40.0} or [{"beam": 3, "length": 40.0}].
std::map<std::size_t, double> parse_overrides(const json& j) {
  std::map<std::size_t, double> out;
  auto add = [&](std::size_t beam, const json& value) {
    if (!value.is_number()) throw invalid("override lengths must be numbers");
    const double length = value.get<double>();
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw invalid("override length for beam " + std::to_string(beam) + " must be positive");
    }
    out[beam] = length;
  };
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) add(index_from_key(key), value);
  } else if (j.is_array()) {
    for (const json& entry : j) {
      const auto beam = entry.is_object() && entry.contains("beam") ? as_index(entry.at("beam"))
                                                                    : std::nullopt;
      if (!beam || !entry.contains("length")) {
        throw invalid("override entries need an unsigned 'beam' and a 'length'");
      }
      add(*beam, entry.at("length"));
    }
  } else if (!j.is_null()) {
    throw invalid("'overrides' must be an object or an array");
  }
  return out;
}

}  // namespace

RepertoireService::RepertoireService(fs::path directory) : directory_(std::move(directory)) {}

std::shared_ptr<const RepertoireService::Loaded> RepertoireService::load(std::string_view id) const {
  if (!valid_id(id)) throw ServiceError(404, "not_found", "unknown repertoire '" + std::string(id) + "'");
  const fs::path path = directory_ / (std::string(id) + std::string(kArchiveExtension));
  std::error_code ec;
  const auto mtime = fs::last_write_time(path, ec);
  if (ec || !is_archive_name(path.filename().string())) {
    throw ServiceError(404, "not_found", "unknown repertoire '" + std::string(id) + "'");
  }
  {
    std::shared_lock lock(mutex_);
    const auto it = cache_.find(id);
    if (it != cache_.end() && it->second->mtime == mtime) return it->second;
  }

  auto loaded = std::make_shared<Loaded>();
  loaded->id = std::string(id);
  loaded->mtime = mtime;
  try {
    loaded->file = load_archive(path);
    if (loaded->file.kind == ArchiveKind::Repertoire) loaded->repertoire = to_repertoire(loaded->file);
    if (loaded->file.aurora_checkpoint) {
      std::ifstream in(directory_ / *loaded->file.aurora_checkpoint, std::ios::binary);
      if (in) {
        loaded->autoencoder = Autoencoder::load(in);
      } else {
        log_warning("autoencoder checkpoint " + *loaded->file.aurora_checkpoint + " not found");
      }
    }
  } catch (const std::exception& e) {
    throw ServiceError(422, "unreadable_archive", std::string(id) + ": " + e.what());
  }

  std::unique_lock lock(mutex_);
  cache_[loaded->id] = loaded;
  return loaded;
}

const Evaluation& RepertoireService::record(const Loaded& archive, std::size_t index) const {
  if (archive.repertoire) {
    const auto it = archive.repertoire->cells.find(index);
    if (it == archive.repertoire->cells.end()) {
      if (index >= archive.repertoire->grid.total_cells()) {
        throw ServiceError(404, "not_found", "cell " + std::to_string(index) + " is outside the grid");
      }
      throw ServiceError(404, "empty_cell", "cell " + std::to_string(index) + " holds no elite");
    }
    return it->second;
  }
  if (index >= archive.file.records.size()) {
    throw ServiceError(404, "not_found", "rank " + std::to_string(index) + " is out of range");
  }
  return archive.file.records[index].evaluation;
}

json RepertoireService::list_repertoires() const {
  json repertoires = json::array();
  json warnings = json::array();
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(directory_, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && is_archive_name(name)) {
      ids.push_back(name.substr(0, name.size() - kArchiveExtension.size()));
    }
  }
  if (ec) warnings.push_back({{"file", directory_.string()}, {"message", ec.message()}});
  std::sort(ids.begin(), ids.end());

  for (const std::string& id : ids) {
    std::shared_ptr<const Loaded> a;
    try {
      a = load(id);
    } catch (const ServiceError& e) {
      log_warning("skipping " + id + ": " + e.what());
      warnings.push_back({{"file", id + std::string(kArchiveExtension)}, {"message", e.what()}});
      continue;
    }
    const RunInfo& info = a->file.info;
    json s;
    s["id"] = id;
    s["kind"] = a->repertoire ? "repertoire" : "population";
    s["algorithm"] = info.algorithm;
    s["fitness"] = std::string(to_string(info.fitness));
    s["space"] = info.space ? json(std::string(to_string(*info.space))) : json(nullptr);
    s["seed"] = info.seed;
    s["evaluations"] = info.evaluations;
    s["records"] = a->file.records.size();
    if (a->repertoire) {
      s["cells"] = a->repertoire->grid.total_cells();
      s["coverage"] = a->repertoire->coverage();
      s["dimensions"] = a->repertoire->grid.axes.size();
    } else {
      s["coverage"] = nullptr;
    }
    json best = nullptr;
    double best_quality = -std::numeric_limits<double>::infinity();
    for (const ArchiveRecord& rec : a->file.records) {
      if (rec.evaluation.quality > best_quality) {
        best_quality = rec.evaluation.quality;
        best = rec.evaluation.fitness.scalar;
      }
    }
    s["best_fitness"] = best;
    repertoires.push_back(std::move(s));
  }
  return {{"repertoires", repertoires}, {"warnings", warnings}};
}

json RepertoireService::get_grid(std::string_view id, std::size_t rows, std::size_t cols,
                                 std::array<std::size_t, 2> dims) const {
  const auto a = load(id);
  if (!a->repertoire) throw invalid("'" + std::string(id) + "' holds a population, not a grid");
  DownsampledMap map;
  try {
    map = downsample(*a->repertoire, rows, cols, dims);
  } catch (const std::invalid_argument& e) {
    throw invalid(e.what());
  }
  json cells = json::array();
  for (std::size_t r = 0; r < map.rows; ++r) {
    for (std::size_t c = 0; c < map.cols; ++c) {
      const auto& cell = map.at(r, c);
      if (!cell) continue;
      cells.push_back({{"row", r},
                       {"col", c},
                       {"cell", cell->source_cell},
                       {"fitness", cell->elite.fitness.scalar},
                       {"quality", cell->elite.quality},
                       {"error_count", cell->elite.error_count},
                       {"descriptor", cell->elite.descriptor ? json(cell->elite.descriptor->values)
                                                             : json(nullptr)},
                       {"foot_path", path_json(cell->foot_path)},
                       {"extent", cell->extent},
                       {"scale", cell->relative_scale}});
    }
  }
  return {{"id", std::string(id)},
          {"rows", map.rows},
          {"cols", map.cols},
          {"dims", json::array({map.dims[0], map.dims[1]})},
          {"fitness_kind", std::string(to_string(map.fitness))},
          {"grid", to_json(a->repertoire->grid)},
          {"filled", map.filled()},
          {"cells", cells}};
}

json RepertoireService::get_cell(std::string_view id, std::size_t index) const {
  const auto a = load(id);
  const Evaluation& e = record(*a, index);
  json j = to_json(e);
  j[a->repertoire ? "cell" : "rank"] = index;
  j["quality"] = e.quality;
  if (a->repertoire) {
    j["coords"] = a->repertoire->grid.coords(index);
  }
  j["id"] = std::string(id);
  j["fitness_kind"] = std::string(to_string(a->file.info.fitness));
  j["steps"] = a->file.info.steps;
  return j;
}

json RepertoireService::build_sheet(std::string_view id, std::size_t index, double pitch) const {
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw invalid("pitch must be positive");
  const auto a = load(id);
  const Evaluation& e = record(*a, index);
  json j = to_json(linkqd::build_sheet(e.genome, a->file.info, pitch));
  j["id"] = std::string(id);
  j["cell"] = index;
  return j;
}

json RepertoireService::simulate(const json& request) const {
  if (!request.is_object()) throw invalid("request body must be a JSON object");

  RunInfo info;
  info.space.reset();
  Genome genome;
  std::shared_ptr<const Loaded> source;
  const bool from_archive = request.contains("archive");
  if (from_archive == request.contains("genome")) {
    throw invalid("give either 'archive' with 'cell' or an inline 'genome'");
  }
  try {
    if (from_archive) {
      const auto cell = request.contains("cell") ? as_index(request.at("cell")) : std::nullopt;
      if (!request.at("archive").is_string() || !cell) {
        throw invalid("'archive' must be an id and 'cell' an unsigned index");
      }
      source = load(request.at("archive").get<std::string>());
      info = source->file.info;
      genome = record(*source, *cell).genome;
    } else {
      if (request.contains("encoding")) info.encoding = encoding_from_json(request.at("encoding"));
      info.encoding.validate();
      const json& g = request.at("genome");
      genome = g.is_array() ? genome_from_json(json{{"genes", g}}) : genome_from_json(g);
      if (genome.genes.size() != info.encoding.genome_length()) {
        throw invalid("genome has " + std::to_string(genome.genes.size()) + " genes, expected " +
                      std::to_string(info.encoding.genome_length()));
      }
    }
    if (request.contains("steps")) {
      const auto steps = as_index(request.at("steps"));
      if (!steps) throw invalid("'steps' must be an unsigned integer");
      info.steps = *steps;
    }
    if (request.contains("fitness")) {
      info.fitness = parse_fitness_kind(request.at("fitness").get<std::string>());
    }
  } catch (const ServiceError&) {
    throw;
  } catch (const std::exception& e) {
    throw invalid(e.what());
  }
  if (info.steps < 3 || info.steps > kMaxSimulationSteps) {
    throw invalid("'steps' must lie in [3, " + std::to_string(kMaxSimulationSteps) + "]");
  }

  Linkage linkage = decode(genome, info.encoding);
  const auto overrides = parse_overrides(request.value("overrides", json(nullptr)));
  json beams = json::array();
  const std::vector<Beam> original = linkage.beams();
  for (const auto& [beam, length] : overrides) {
    if (beam >= original.size()) {
      throw invalid("override on beam " + std::to_string(beam) + ", linkage has " +
                    std::to_string(original.size()));
    }
    linkage.set_beam_length(beam, length);
  }
  for (std::size_t i = 0; i < linkage.beams().size(); ++i) {
    const Beam& b = linkage.beams()[i];
    beams.push_back({{"index", i},
                     {"a", b.a},
                     {"b", b.b},
                     {"length", b.length},
                     {"original_length", original[i].length}});
  }

  const PathTrace trace = solve(linkage, info.steps);
  EvalContext ctx;
  ctx.encoding = info.encoding;
  ctx.fitness = info.fitness;
  ctx.steps = info.steps;
  ctx.targets = info.targets;
  if (source && source->repertoire) {
    ctx.space = info.space;
    if (source->autoencoder) ctx.autoencoder = &*source->autoencoder;
  }
  const Evaluation e = evaluate(genome, linkage, trace, ctx);

  json nodes = json::array();
  for (std::size_t n = 0; n < linkage.node_count(); ++n) {
    nodes.push_back({{"id", n},
                     {"kind", node_kind(n)},
                     {"moving", linkage.is_moving(n)},
                     {"foot", n == trace.foot_index}});
  }
  json frames = json::array();
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    json positions = json::array();
    for (std::size_t n = 0; n < trace.node_count(); ++n) {
      const auto p = trace.position(k, n);
      positions.push_back(p ? point_json(*p) : json(nullptr));
    }
    frames.push_back({{"step", k},
                      {"angle", 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(trace.steps())},
                      {"feasible", trace.feasible(k)},
                      {"positions", positions}});
  }

  json out;
  out["steps"] = info.steps;
  out["error_count"] = trace.error_count;
  out["nodes"] = nodes;
  out["beams"] = beams;
  out["frames"] = frames;
  out["foot"] = {{"node", trace.foot_index},
                 {"path", path_json(trace.foot_path)},
                 {"steps", trace.foot_steps}};
  out["fitness"] = {{"kind", std::string(to_string(info.fitness))},
                    {"value", e.fitness.scalar},
                    {"quality", e.quality},
                    {"objectives", e.fitness.objectives},
                    {"fp", fitness_fp(trace, info.targets)},
                    {"fsl", fitness_fsl(trace)}};
  out["metrics"] = summary_json(e.summary);
  out["descriptor"] = e.descriptor ? json(e.descriptor->values) : json(nullptr);

  bool want_sheet = false;
  if (request.contains("buildsheet")) {
    if (!request.at("buildsheet").is_boolean()) throw invalid("'buildsheet' must be a boolean");
    want_sheet = request.at("buildsheet").get<bool>();
  }
  if (want_sheet) {
    double pitch = kDefaultPitch;
    if (request.contains("pitch")) {
      if (!request.at("pitch").is_number()) throw invalid("'pitch' must be a number");
      pitch = request.at("pitch").get<double>();
    }
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw invalid("pitch must be positive");
    out["buildsheet"] = to_json(linkqd::build_sheet(linkage, info, pitch));
  }
  return out;
}

}  // namespace linkqd
