/**
 * Copyright 2026 The ambiloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambiloc/dataset.hpp"
#include "ambiloc/decode.hpp"
#include "ambiloc/metrics.hpp"
#include "ambiloc/room_sim.hpp"
#include "ambiloc/train.hpp"

namespace ambiloc::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a subcommand needs, read from an INI document with sections
/// [experiment], [grid], [model], [dataset], [train], [decode], [metrics]
/// and [room]. Unknown sections or keys are rejected.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out = "ambiloc-out";
  int jobs = 1;
  /// One of the nine published names or "reduced".
  std::string arch = "reduced";
  double grid_alpha = 10.0;

  DatasetSpec dataset;
  TrainSchedule schedule;

  PeakMode decode = KnownCount{1};
  double peak_radius_factor = kPeakRadiusFactor;

  std::vector<double> tolerances = kDefaultTolerances;
  AccuracyMode accuracy_mode = AccuracyMode::PooledSources;

  RoomConfig room;
  SrirOptions srir;

  /// Applies cross-field rules (arch name known, grid shared with the
  /// dataset, positive jobs, component validators). Throws ConfigError.
  void validate() const;
};

/// Parses an INI file. Relative paths inside it resolve against the file's
/// directory. Throws ConfigError with the offending key.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Canonical INI text of a configuration; parse_config(to_ini(c)) == c for
/// every persisted field.
std::string to_ini(const ExperimentConfig& c);

}  // namespace ambiloc::cli
