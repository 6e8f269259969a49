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

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "ambiloc/dsp.hpp"
#include "ambiloc/geometry.hpp"
#include "ambiloc/network.hpp"

namespace ambiloc {

/// Frame-averaged network output: one probability per grid class.
std::vector<double> average_frames(const RowMatrix<float>& output);
std::vector<double> average_frames(const RowMatrix<double>& output);

/// Keep the S highest peaks.
struct KnownCount {
  std::size_t sources = 1;
};

/// Keep every peak scoring at least beta.
struct Threshold {
  double beta = 0.2;
};

using PeakMode = std::variant<KnownCount, Threshold>;

inline constexpr double kPeakRadiusFactor = 1.5;

struct Peak {
  std::size_t class_index = 0;
  double score = 0.0;
};

struct PeakResult {
  std::vector<Peak> peaks;  // by descending score, then ascending class
  /// Known-count mode found fewer local maxima than requested.
  bool short_of_request = false;
};

/// Local-maximum detection on the sphere without smoothing. A class is a
/// peak when no class within radius_factor * alpha scores higher and every
/// equal-scoring one in that radius has a larger index.
class PeakPicker {
 public:
  explicit PeakPicker(const SphericalGrid& grid, double radius_factor = kPeakRadiusFactor);

  /// Throws std::invalid_argument if scores.size() differs from the class
  /// count, S is 0, or beta is outside (0, 1).
  PeakResult pick(std::span<const double> scores, const PeakMode& mode) const;

  /// Unsorted local maxima as defined above.
  std::vector<std::size_t> local_maxima(std::span<const double> scores) const;

  const SphericalGrid& grid() const { return *grid_; }
  const std::vector<std::size_t>& neighborhood(std::size_t c) const { return neighbors_.at(c); }

 private:
  const SphericalGrid* grid_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

struct DoaEstimate {
  Direction direction;
  std::size_t class_index = 0;
  double score = 0.0;
};

std::vector<DoaEstimate> to_estimates(const PeakResult& result, const SphericalGrid& grid);

/// Training-free localizer: bins above the median bin power (and above an
/// absolute floor) vote for the grid class nearest to their active-intensity
/// direction, weighted by bin power; the normalized vote map is peak-picked.
/// Returns an empty list for silence.
std::vector<DoaEstimate> histogram_localizer(const FoaSpectrogram& slice, const PeakPicker& picker,
                                             const PeakMode& mode);

}  // namespace ambiloc
