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

#include <httplib.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "linkqd/archive.hpp"
#include "linkqd/http_server.hpp"
#include "linkqd/service.hpp"

using namespace linkqd;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Temporary archive directory shared by every test in this file.
struct Fixture {
  fs::path dir;
  Repertoire wh;
  PopulationResult ea;

  Fixture() {
    dir = fs::temp_directory_path() / ("linkqd_server_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    RunConfig cfg;
    cfg.batch_size = 300;
    cfg.budget = 900;
    cfg.seed = 5;
    cfg.workers = 1;
    wh = run_map_elites(cfg).archive;
    save_repertoire(dir / "wh.jsonl", wh);

    cfg.algorithm = Algorithm::EA;
    cfg.batch_size = 20;
    cfg.budget = 40;
    ea = run_ea(cfg);
    std::ofstream pop(dir / "ea-small.jsonl");
    write_population(pop, ea.info, ea.population);
    std::ofstream(dir / "wh.metrics.jsonl") << "{\"config\": {}}\n";
    std::ofstream(dir / "notes.txt") << "ignored\n";
  }
  ~Fixture() { fs::remove_all(dir); }

  [[nodiscard]] std::size_t first_cell() const { return wh.cells.begin()->first; }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

template <typename F>
void expect_error(F&& f, int status, const std::string& code) {
  try {
    f();
    FAIL("expected a ServiceError");
  } catch (const ServiceError& e) {
    CHECK(e.status() == status);
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("listing an empty directory") {
  const fs::path empty = fs::temp_directory_path() / "linkqd_server_empty";
  fs::create_directories(empty);
  const RepertoireService service(empty);
  const json list = service.list_repertoires();
  CHECK(list["repertoires"].empty());
  CHECK(list["warnings"].empty());
  fs::remove_all(empty);
}

TEST_CASE("listing summarises each archive") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  const json list = service.list_repertoires();
  REQUIRE(list["repertoires"].size() == 2);
  const json& ea = list["repertoires"][0];
  const json& wh = list["repertoires"][1];
  CHECK(ea["id"] == "ea-small");
  CHECK(ea["kind"] == "population");
  CHECK(ea["records"] == 20);
  CHECK(ea["coverage"].is_null());
  CHECK(wh["id"] == "wh");
  CHECK(wh["kind"] == "repertoire");
  CHECK(wh["space"] == "wh");
  CHECK(wh["cells"] == 10000);
  CHECK(wh["coverage"].get<double>() == doctest::Approx(f.wh.coverage()));
  CHECK(wh["evaluations"] == 900);
  double best = -1e300;
  for (const auto& [cell, e] : f.wh.cells) best = std::max(best, e.fitness.scalar);
  CHECK(wh["best_fitness"].get<double>() == best);
}

TEST_CASE("unreadable archives become warnings") {
  const fs::path dir = fs::temp_directory_path() / "linkqd_server_bad";
  fs::create_directories(dir);
  fs::copy_file(fixture().dir / "wh.jsonl", dir / "good.jsonl", fs::copy_options::overwrite_existing);
  std::ofstream(dir / "broken.jsonl") << "{\"format\": \"something else\"}\n";
  const RepertoireService service(dir);
  const json list = service.list_repertoires();
  CHECK(list["repertoires"].size() == 1);
  REQUIRE(list["warnings"].size() == 1);
  CHECK(list["warnings"][0]["file"] == "broken.jsonl");
  expect_error([&] { (void)service.get_cell("broken", 0); }, 422, "unreadable_archive");
  fs::remove_all(dir);
}

TEST_CASE("grid payload") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  const json g = service.get_grid("wh", 5, 5);
  CHECK(g["rows"] == 5);
  CHECK(g["cols"] == 5);
  CHECK(g["cells"].size() <= 25);
  CHECK(g["filled"] == g["cells"].size());
  for (const json& c : g["cells"]) {
    const Evaluation& e = f.wh.cells.at(c["cell"].get<std::size_t>());
    CHECK(c["fitness"].get<double>() == e.fitness.scalar);
    CHECK(c["foot_path"].size() > 0);
    CHECK(c["scale"].get<double>() <= 1.0);
  }
  CHECK(service.get_grid("wh", 5, 5) == g);
  CHECK(service.get_grid("wh", 4, 6, {1, 0})["dims"] == json::array({1, 0}));
  expect_error([&] { (void)service.get_grid("wh", 0, 5); }, 400, "invalid_request");
  expect_error([&] { (void)service.get_grid("wh", 5, 5, {0, 0}); }, 400, "invalid_request");
  expect_error([&] { (void)service.get_grid("ea-small", 5, 5); }, 400, "invalid_request");
  expect_error([&] { (void)service.get_grid("missing", 5, 5); }, 404, "not_found");
  expect_error([&] { (void)service.get_grid("../wh", 5, 5); }, 404, "not_found");
  expect_error([&] { (void)service.get_grid("wh.metrics", 5, 5); }, 404, "not_found");
}

TEST_CASE("cell lookup") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  const std::size_t cell = f.first_cell();
  const json c = service.get_cell("wh", cell);
  CHECK(c["cell"] == cell);
  CHECK(c["genes"].get<std::vector<double>>() == f.wh.cells.at(cell).genome.genes);
  CHECK(c["coords"].size() == 2);
  std::size_t empty = 0;
  while (f.wh.cells.count(empty)) ++empty;
  expect_error([&] { (void)service.get_cell("wh", empty); }, 404, "empty_cell");
  expect_error([&] { (void)service.get_cell("wh", 10000); }, 404, "not_found");
  CHECK(service.get_cell("ea-small", 3)["rank"] == 3);
  expect_error([&] { (void)service.get_cell("ea-small", 20); }, 404, "not_found");
}

TEST_CASE("simulate reproduces the stored record") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  for (const auto& [cell, e] : f.wh.cells) {
    const json out = service.simulate({{"archive", "wh"}, {"cell", cell}});
    CHECK(out["fitness"]["value"].get<double>() == e.fitness.scalar);
    CHECK(out["error_count"] == e.error_count);
    CHECK(out["metrics"]["width"].get<double>() == e.summary.width);
    CHECK(out["metrics"]["height"].get<double>() == e.summary.height);
    CHECK(out["descriptor"].get<std::vector<double>>() == e.descriptor->values);
    CHECK(out["frames"].size() == f.wh.info.steps);
    if (cell > f.first_cell() + 2000) break;
  }
}

TEST_CASE("simulate with overrides") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  const std::size_t cell = f.first_cell();
  const json base = service.simulate({{"archive", "wh"}, {"cell", cell}});

  json same = json::object();
  for (const json& b : base["beams"]) same[std::to_string(b["index"].get<std::size_t>())] = b["length"];
  const json identity = service.simulate({{"archive", "wh"}, {"cell", cell}, {"overrides", same}});
  CHECK(identity["frames"] == base["frames"]);
  CHECK(identity["fitness"] == base["fitness"]);

  const json array_form = json::array({{{"beam", 0}, {"length", 500.0}}});
  const json out = service.simulate({{"archive", "wh"}, {"cell", cell}, {"overrides", array_form}});
  CHECK(out["beams"][0]["length"] == 500.0);
  CHECK(out["beams"][0]["original_length"] == base["beams"][0]["length"]);

  // Inline genome: crank 35 plus one two-beam joint too short to close.
  EncodingConfig enc;
  enc.n_joints = 1;
  std::vector<double> genes(enc.genome_length(), 0.5);
  const json inline_req{{"genome", genes}, {"encoding", to_json(enc)}, {"steps", 36}};
  const json ok = service.simulate(inline_req);
  CHECK(ok["steps"] == 36);
  CHECK(ok["fitness"].contains("fp"));
  CHECK(ok["fitness"].contains("fsl"));
  json tiny = inline_req;
  tiny["overrides"] = {{"1", 0.5}, {"2", 0.5}};
  CHECK(service.simulate(tiny)["error_count"] == 36);
}

TEST_CASE("simulate validation") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  const std::size_t cell = f.first_cell();
  const json good{{"archive", "wh"}, {"cell", cell}};
  auto with = [&](const char* key, json value) {
    json r = good;
    r[key] = std::move(value);
    return r;
  };
  expect_error([&] { (void)service.simulate(json::array()); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(json::object()); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("steps", 721)); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("steps", 2)); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("steps", -5)); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("fitness", "speed")); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("overrides", {{"x", 3}})); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("overrides", {{"0", -3}})); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("overrides", {{"999", 3}})); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("overrides", 7)); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("buildsheet", "yes")); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate(with("genome", json::array({0.5}))); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate({{"genome", json::array({0.5, 0.5})}}); }, 400, "invalid_request");
  expect_error([&] { (void)service.simulate({{"archive", "nope"}, {"cell", 0}}); }, 404, "not_found");
  CHECK(service.simulate(with("steps", 720))["frames"].size() == 720);
}

TEST_CASE("build sheets") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  const std::size_t cell = f.first_cell();
  const json sheet = service.build_sheet("wh", cell, 8.0);
  CHECK(sheet["cell"] == cell);
  CHECK(sheet["beams"].size() == decode(f.wh.cells.at(cell).genome, f.wh.info.encoding).beams().size());
  for (const json& b : sheet["beams"]) {
    const double s = b["snapped_mm"].get<double>();
    CHECK(std::fmod(s, 8.0) == 0.0);
  }
  expect_error([&] { (void)service.build_sheet("wh", cell, 0.0); }, 400, "invalid_request");
  const json sim = service.simulate({{"archive", "wh"}, {"cell", cell}, {"buildsheet", true}});
  json expected = service.build_sheet("wh", cell, 8.0);
  expected.erase("id");
  expected.erase("cell");
  CHECK(sim["buildsheet"] == expected);
}

TEST_CASE("http end to end") {
  const Fixture& f = fixture();
  const RepertoireService service(f.dir);
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto list = client.Get("/api/repertoires");
  REQUIRE(list);
  CHECK(list->status == 200);
  CHECK(json::parse(list->body)["repertoires"].size() == 2);

  auto grid = client.Get("/api/repertoires/wh/grid?rows=3&cols=4");
  REQUIRE(grid);
  CHECK(grid->status == 200);
  CHECK(json::parse(grid->body) == service.get_grid("wh", 3, 4));

  const std::string cell = std::to_string(f.first_cell());
  auto rec = client.Get("/api/repertoires/wh/cells/" + cell);
  REQUIRE(rec);
  CHECK(rec->status == 200);
  auto sheet = client.Get("/api/repertoires/wh/cells/" + cell + "/buildsheet?pitch=4");
  REQUIRE(sheet);
  CHECK(json::parse(sheet->body)["pitch"] == 4.0);

  auto sim = client.Post("/api/simulate", json{{"archive", "wh"}, {"cell", f.first_cell()}}.dump(),
                         "application/json");
  REQUIRE(sim);
  CHECK(sim->status == 200);
  CHECK(json::parse(sim->body)["steps"] == f.wh.info.steps);

  auto bad_json = client.Post("/api/simulate", "{not json", "application/json");
  REQUIRE(bad_json);
  CHECK(bad_json->status == 400);
  CHECK(json::parse(bad_json->body)["code"] == "invalid_json");

  auto missing = client.Get("/api/repertoires/nope/grid");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto bad_rows = client.Get("/api/repertoires/wh/grid?rows=abc");
  REQUIRE(bad_rows);
  CHECK(bad_rows->status == 400);
  auto bad_cell = client.Get("/api/repertoires/wh/cells/12x");
  REQUIRE(bad_cell);
  CHECK(bad_cell->status == 400);

  server.stop();
  worker.join();
}
