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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ambiloc/network.hpp"
#include "ambiloc/speech.hpp"

namespace ambiloc::oracle {

std::size_t grid_class_count_by_rings(double alpha_deg) {
  const auto rings = static_cast<std::size_t>(std::floor(180.0 / alpha_deg));
  std::size_t total = 0;
  for (std::size_t i = 0; i <= rings; ++i) {
    const double phi = -90.0 + 180.0 * static_cast<double>(i) / static_cast<double>(rings);
    const double c = std::max(0.0, std::cos(deg2rad(phi)));
    total += static_cast<std::size_t>(std::floor(360.0 / alpha_deg * c + 1e-9)) + 1;
  }
  return total;
}

std::size_t nearest_class_exhaustive(const SphericalGrid& grid, const Direction& d) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < grid.class_count(); ++c) {
    const double dist = angular_distance(d, grid.point(c));
    if (dist < best_dist) {
      best = c;
      best_dist = dist;
    }
  }
  return best;
}

std::vector<std::size_t> neighbors_exhaustive(const SphericalGrid& grid, std::size_t c, double radius_deg) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < grid.class_count(); ++k) {
    if (k != c && angular_distance(grid.point(c), grid.point(k)) <= radius_deg) out.push_back(k);
  }
  return out;
}

double min_pairwise_angle(const SphericalGrid& grid) {
  double best = 180.0;
  for (std::size_t a = 0; a < grid.class_count(); ++a) {
    for (std::size_t b = a + 1; b < grid.class_count(); ++b) {
      best = std::min(best, angular_distance(grid.point(a), grid.point(b)));
    }
  }
  return best;
}

std::vector<std::size_t> local_maxima_exhaustive(const SphericalGrid& grid, std::span<const double> scores,
                                                 double radius_deg) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < grid.class_count(); ++c) {
    bool peak = true;
    for (std::size_t k = 0; k < grid.class_count() && peak; ++k) {
      if (k == c || angular_distance(grid.point(c), grid.point(k)) > radius_deg) continue;
      peak = scores[k] < scores[c] || (scores[k] == scores[c] && k > c);
    }
    if (peak) out.push_back(c);
  }
  return out;
}

double best_assignment_total(std::span<const Direction> truth, std::span<const Direction> estimates) {
  const bool truth_short = truth.size() <= estimates.size();
  const auto small = truth_short ? truth : estimates;
  const auto large = truth_short ? estimates : truth;
  if (small.empty()) return 0.0;
  std::vector<std::size_t> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  // Every permutation of the long list; its prefix is an injection.
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) total += angular_distance(small[i], large[perm[i]]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Direction random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double z = 2.0 * u(rng) - 1.0;
  const double az = 360.0 * u(rng) - 180.0;
  return Direction(az, rad2deg(std::asin(z)));
}

Direction random_direction_within(std::mt19937_64& rng, double max_abs_elevation_deg) {
  for (;;) {
    const Direction d = random_direction(rng);
    if (std::abs(d.elevation_deg()) <= max_abs_elevation_deg) return d;
  }
}

Direction doa_from_gains(double x, double y, double z) { return Direction::from_vector({x, y, z}); }

FoaSignal plane_wave_speech(const Direction& d, double seconds, std::uint64_t seed) {
  return encode_plane_wave(synthesize_utterance(seconds, seed), d);
}

ArchConfig gradient_check_arch() {
  ArchConfig cfg;
  cfg.name = "gradcheck";
  cfg.pool_sizes = {8};
  cfg.conv_filters = 4;
  cfg.rnn_hidden = 8;
  cfg.class_count = 7;
  cfg.dense_widths = {7, 7};
  return cfg;
}

GradientCheck finite_difference_check(const ArchConfig& arch, std::uint64_t seed, std::size_t per_group,
                                      double smooth_step, double conv_step) {
  std::mt19937_64 rng(seed);
  auto params = NetworkParams<double>::initialized(arch, seed);

  std::uniform_real_distribution<float> feat(-0.8f, 0.8f);
  std::vector<FeatureTensor> inputs(2, FeatureTensor(static_cast<std::size_t>(arch.input_frames),
                                                     static_cast<std::size_t>(arch.input_bins)));
  for (auto& x : inputs) {
    for (auto& v : x.values) v = feat(rng);
  }
  std::vector<std::vector<float>> targets(2, std::vector<float>(static_cast<std::size_t>(arch.class_count), 0.0f));
  targets[0][1] = 1.0f;
  targets[1][4] = 1.0f;
  targets[1][5] = 1.0f;
  const std::vector<BatchItem> batch{{&inputs[0], targets[0]}, {&inputs[1], targets[1]}};

  const auto analytic = loss_and_gradients(params, batch);

  std::vector<std::size_t> conv, recurrent, dense;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& owner = params.flat_owner(i);
    if (owner.starts_with("block")) {
      conv.push_back(i);
    } else if (owner.starts_with("bilstm")) {
      recurrent.push_back(i);
    } else {
      dense.push_back(i);
    }
  }

  GradientCheck out;
  const auto probe = [&](const std::vector<std::size_t>& group, std::size_t& counter, double step) {
    std::vector<std::size_t> pick = group;
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(std::min(per_group, pick.size()));
    for (const std::size_t i : pick) {
      const double saved = params.flat(i);
      params.flat(i) = saved + step;
      const double up = loss_and_gradients(params, batch).loss;
      params.flat(i) = saved - step;
      const double down = loss_and_gradients(params, batch).loss;
      params.flat(i) = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic.gradients.flat(i);
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      if (rel > out.max_relative_error) {
        out.max_relative_error = rel;
        out.worst_parameter = params.flat_owner(i);
        out.worst_analytic = a;
        out.worst_numeric = numeric;
      }
      ++out.checked;
      ++counter;
    }
  };
  probe(conv, out.conv_checked, conv_step);
  probe(recurrent, out.recurrent_checked, smooth_step);
  probe(dense, out.dense_checked, smooth_step);
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ambiloc-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ambiloc::oracle
