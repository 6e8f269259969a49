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

#include "ambiloc/decode.hpp"

#include <algorithm>
#include <stdexcept>

#include "ambiloc/features.hpp"

namespace ambiloc {

namespace {

constexpr double kSilenceFloor = 1e-12;

template <typename S>
std::vector<double> mean_rows(const RowMatrix<S>& output) {
  if (output.rows() == 0) throw std::invalid_argument("average_frames: no frames");
  std::vector<double> mean(static_cast<std::size_t>(output.cols()), 0.0);
  for (Eigen::Index t = 0; t < output.rows(); ++t) {
    for (Eigen::Index c = 0; c < output.cols(); ++c) mean[static_cast<std::size_t>(c)] += output(t, c);
  }
  for (auto& v : mean) v /= static_cast<double>(output.rows());
  return mean;
}

}  // namespace

std::vector<double> average_frames(const RowMatrix<float>& output) { return mean_rows(output); }
std::vector<double> average_frames(const RowMatrix<double>& output) { return mean_rows(output); }

PeakPicker::PeakPicker(const SphericalGrid& grid, double radius_factor) : grid_(&grid) {
  if (!(radius_factor > 0.0)) throw std::invalid_argument("peaks: radius factor must be positive");
  const double radius = radius_factor * grid.resolution_deg();
  neighbors_.reserve(grid.class_count());
  for (std::size_t c = 0; c < grid.class_count(); ++c) neighbors_.push_back(grid.neighbors(c, radius));
}

std::vector<std::size_t> PeakPicker::local_maxima(std::span<const double> scores) const {
  if (scores.size() != grid_->class_count()) throw std::invalid_argument("peaks: score vector length mismatch");
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    bool peak = true;
    for (const std::size_t n : neighbors_[c]) {
      if (scores[n] > scores[c] || (scores[n] == scores[c] && n < c)) {
        peak = false;
        break;
      }
    }
    if (peak) out.push_back(c);
  }
  return out;
}

PeakResult PeakPicker::pick(std::span<const double> scores, const PeakMode& mode) const {
  if (const auto* known = std::get_if<KnownCount>(&mode); known && known->sources == 0) {
    throw std::invalid_argument("peaks: source count must be at least 1");
  }
  if (const auto* th = std::get_if<Threshold>(&mode); th && !(th->beta > 0.0 && th->beta < 1.0)) {
    throw std::invalid_argument("peaks: threshold must lie in (0, 1)");
  }
  PeakResult result;
  for (const std::size_t c : local_maxima(scores)) result.peaks.push_back({c, scores[c]});
  std::stable_sort(result.peaks.begin(), result.peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.score > b.score; });
  if (const auto* known = std::get_if<KnownCount>(&mode)) {
    if (result.peaks.size() < known->sources) {
      result.short_of_request = true;
    } else {
      result.peaks.resize(known->sources);
    }
  } else {
    const double beta = std::get<Threshold>(mode).beta;
    std::erase_if(result.peaks, [beta](const Peak& p) { return p.score < beta; });
  }
  return result;
}

std::vector<DoaEstimate> to_estimates(const PeakResult& result, const SphericalGrid& grid) {
  std::vector<DoaEstimate> out;
  for (const auto& p : result.peaks) out.push_back({grid.point(p.class_index), p.class_index, p.score});
  return out;
}

std::vector<DoaEstimate> histogram_localizer(const FoaSpectrogram& slice, const PeakPicker& picker,
                                             const PeakMode& mode) {
  if (slice.frames() == 0) throw std::invalid_argument("histogram: no frames");
  const auto& grid = picker.grid();
  std::vector<double> power;
  power.reserve(slice.frames() * slice.bins());
  for (std::size_t t = 0; t < slice.frames(); ++t) {
    for (std::size_t f = 0; f < slice.bins(); ++f) power.push_back(bin_power(slice, t, f));
  }
  std::vector<double> sorted = power;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double gate = std::max(*mid, kSilenceFloor);

  std::vector<double> votes(grid.class_count(), 0.0);
  bool any = false;
  for (std::size_t t = 0; t < slice.frames(); ++t) {
    for (std::size_t f = 0; f < slice.bins(); ++f) {
      const double p = power[t * slice.bins() + f];
      if (!(p > gate)) continue;
      const auto w = slice.at(t, f, 0);
      const Vec3 active{(w * std::conj(slice.at(t, f, 1))).real(), (w * std::conj(slice.at(t, f, 2))).real(),
                        (w * std::conj(slice.at(t, f, 3))).real()};
      if (!(norm(active) > 0.0)) continue;
      votes[grid.nearest_class(Direction::from_vector(active))] += p;
      any = true;
    }
  }
  if (!any) return {};
  const double top = *std::max_element(votes.begin(), votes.end());
  for (auto& v : votes) v /= top;
  return to_estimates(picker.pick(votes, mode), grid);
}

}  // namespace ambiloc
