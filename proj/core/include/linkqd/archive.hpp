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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "linkqd/evolve.hpp"
#include "linkqd/repertoire.hpp"

namespace linkqd {

inline constexpr const char* kArchiveFormat = "linkqd-archive";
inline constexpr int kArchiveVersion = 1;

enum class ArchiveKind { Repertoire, Population };

/// One persisted individual. For repertoires `slot` is the cell index, for
/// populations the rank in the final population.
struct ArchiveRecord {
  std::size_t slot = 0;
  Evaluation evaluation;
};

/// Decoded archive file. Self-describing: the header carries everything
/// needed to re-simulate and re-bin the records.
struct ArchiveFile {
  ArchiveKind kind = ArchiveKind::Repertoire;
  RunInfo info;
  std::optional<GridSpec> grid;
  /// File name of the autoencoder checkpoint, relative to the archive.
  std::optional<std::string> aurora_checkpoint;
  std::vector<ArchiveRecord> records;
};

/// JSON-lines: one header object, then one record per line in slot order.
void write_archive(std::ostream& out, const Repertoire& r,
                   const std::optional<std::string>& aurora_checkpoint = std::nullopt);
void write_population(std::ostream& out, const RunInfo& info,
                      std::span<const Evaluation> population);

/// Throws std::runtime_error on malformed input or an unknown format/version.
ArchiveFile read_archive(std::istream& in);
ArchiveFile load_archive(const std::filesystem::path& path);

/// Throws std::invalid_argument for population files.
Repertoire to_repertoire(const ArchiveFile& file);

/// Writes `r` to `path`; for MAP-AU runs also writes `ae` next to it as
/// `<stem>.ae.json` and references it from the header.
void save_repertoire(const std::filesystem::path& path, const Repertoire& r,
                     const Autoencoder* ae = nullptr);

// JSON building blocks shared with the run configuration and the server.
nlohmann::json to_json(const EncodingConfig& cfg);
EncodingConfig encoding_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridSpec& grid);
GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TargetPointSet& targets);
TargetPointSet targets_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Genome& g);
Genome genome_from_json(const nlohmann::json& j);
nlohmann::json to_json(const IterationMetrics& m);
/// Record body without its slot: genes, sigma, fitness, objectives,
/// descriptor, error_count, summary.
nlohmann::json to_json(const Evaluation& e);

/// Run configuration file. Missing keys keep their defaults; `budget` is in
/// evaluations.
nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace linkqd
