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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "linkqd/archive.hpp"

namespace linkqd {

/// Largest crank resolution a simulate request may ask for.
inline constexpr std::size_t kMaxSimulationSteps = 720;

/// Request failure carrying an HTTP status and a machine-readable code
/// ("not_found", "invalid_request", ...).
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}

  [[nodiscard]] int status() const { return status_; }
  [[nodiscard]] const std::string& code() const { return code_; }
  [[nodiscard]] nlohmann::json to_json() const { return {{"code", code_}, {"message", what()}}; }

 private:
  int status_;
  std::string code_;
};

/// Read-only queries over the archives (`*.jsonl`, metrics logs excluded) of
/// one directory. Archives are parsed on first use and cached as immutable
/// snapshots, so every method may be called concurrently.
class RepertoireService {
 public:
  explicit RepertoireService(std::filesystem::path directory);

  /// {"repertoires": [...], "warnings": [...]}; unreadable files become
  /// warnings instead of failing the listing.
  [[nodiscard]] nlohmann::json list_repertoires() const;

  /// Downsampled display grid. Each filled cell carries its elite and the
  /// re-simulated foot path.
  [[nodiscard]] nlohmann::json get_grid(std::string_view id, std::size_t rows, std::size_t cols,
                                        std::array<std::size_t, 2> dims = {0, 1}) const;

  /// A stored record by cell index (repertoires) or rank (populations).
  [[nodiscard]] nlohmann::json get_cell(std::string_view id, std::size_t index) const;

  /// Decodes a stored or inline genome and applies beam-length overrides.
  /// The response holds node positions for every crank step plus the
  /// resulting fitness.
  [[nodiscard]] nlohmann::json simulate(const nlohmann::json& request) const;

  [[nodiscard]] nlohmann::json build_sheet(std::string_view id, std::size_t index,
                                           double pitch) const;

  [[nodiscard]] const std::filesystem::path& directory() const { return directory_; }

 private:
  struct Loaded;
  std::shared_ptr<const Loaded> load(std::string_view id) const;
  const Evaluation& record(const Loaded& archive, std::size_t index) const;

  std::filesystem::path directory_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const Loaded>, std::less<>> cache_;
};

}  // namespace linkqd
