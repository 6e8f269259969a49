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

#include "ambiloc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ambiloc {

namespace {

// Guards floor() against cos() landing a hair below an exact integer, e.g.
// (360/30)·cos(60°) evaluating to 5.999999999.
constexpr double kFloorSlack = 1e-9;

double wrap_azimuth(double az) {
  double wrapped = std::fmod(az + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  wrapped -= 180.0;
  // fmod can round 179.99999999999997 + 180 up to 360.
  if (wrapped >= 180.0) wrapped -= 360.0;
  return wrapped;
}

int ring_count_for(double alpha) { return static_cast<int>(std::floor(180.0 / alpha + kFloorSlack)); }

int azimuth_slots(double alpha, double elevation_deg) {
  const double j = (360.0 / alpha) * std::cos(deg2rad(elevation_deg));
  return std::max(0, static_cast<int>(std::floor(j + kFloorSlack)));
}

}  // namespace

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Direction::Direction(double azimuth_deg, double elevation_deg) {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg)) {
    throw std::invalid_argument("direction: non-finite angle");
  }
  if (elevation_deg < -90.0 || elevation_deg > 90.0) {
    throw std::invalid_argument("direction: elevation outside [-90, 90]");
  }
  elevation_ = elevation_deg;
  azimuth_ = std::abs(elevation_deg) == 90.0 ? 0.0 : wrap_azimuth(azimuth_deg);
}

Direction Direction::from_vector(const Vec3& v) {
  const double r = norm(v);
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("direction: zero or non-finite vector");
  }
  const double horizontal = std::hypot(v[0], v[1]);
  const double el = rad2deg(std::atan2(v[2], horizontal));
  const double az = horizontal > 0.0 ? rad2deg(std::atan2(v[1], v[0])) : 0.0;
  return Direction(az, std::clamp(el, -90.0, 90.0));
}

Vec3 Direction::unit_vector() const {
  const double az = deg2rad(azimuth_);
  const double el = deg2rad(elevation_);
  return {std::cos(az) * std::cos(el), std::sin(az) * std::cos(el), std::sin(el)};
}

double angular_distance(const Direction& a, const Direction& b) {
  // atan2 of |u x v| and u . v stays accurate for nearly parallel vectors.
  const Vec3 u = a.unit_vector(), v = b.unit_vector();
  const Vec3 cross{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return rad2deg(std::atan2(norm(cross), dot(u, v)));
}

std::size_t grid_class_count(double alpha_deg) {
  if (!(alpha_deg > 0.0) || alpha_deg > 180.0) {
    throw std::invalid_argument("grid: resolution must lie in (0, 180]");
  }
  const int rings = ring_count_for(alpha_deg);
  std::size_t count = 0;
  for (int i = 0; i <= rings; ++i) {
    const double phi = -90.0 + 180.0 * i / rings;
    const bool pole = (i == 0 || i == rings);
    count += pole ? 1 : static_cast<std::size_t>(azimuth_slots(alpha_deg, phi)) + 1;
  }
  return count;
}

SphericalGrid::SphericalGrid(double alpha_deg) : alpha_(alpha_deg) {
  if (!(alpha_deg > 0.0) || alpha_deg > 180.0) {
    throw std::invalid_argument("grid: resolution must lie in (0, 180]");
  }
  const int rings = ring_count_for(alpha_deg);
  for (int i = 0; i <= rings; ++i) {
    const bool pole = (i == 0 || i == rings);
    const double phi = pole ? (i == 0 ? -90.0 : 90.0) : -90.0 + 180.0 * i / rings;
    const int slots = pole ? 0 : azimuth_slots(alpha_deg, phi);
    ring_begin_.push_back(points_.size());
    ring_elevation_.push_back(phi);
    for (int j = 0; j <= slots; ++j) {
      const double theta = -180.0 + 360.0 * j / (slots + 1);
      points_.emplace_back(theta, phi);
      units_.push_back(points_.back().unit_vector());
    }
  }
}

std::size_t SphericalGrid::ring_of(std::size_t c) const {
  if (c >= points_.size()) throw std::out_of_range("grid: class index");
  const auto it = std::upper_bound(ring_begin_.begin(), ring_begin_.end(), c);
  return static_cast<std::size_t>(std::distance(ring_begin_.begin(), it)) - 1;
}

std::size_t SphericalGrid::nearest_class(const Direction& d) const {
  const Vec3 u = d.unit_vector();
  // Rings are visited by increasing elevation gap; the gap lower-bounds the
  // distance to every point on the ring, so the scan stops once it exceeds
  // the best distance found.
  std::vector<std::size_t> order(ring_begin_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> gap(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    gap[r] = std::abs(ring_elevation_[r] - d.elevation_deg());
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gap[a] < gap[b]; });

  double best = 1e300;
  std::size_t best_index = 0;
  for (const std::size_t r : order) {
    if (gap[r] > best + 1e-9) break;
    const std::size_t end = r + 1 < ring_begin_.size() ? ring_begin_[r + 1] : points_.size();
    for (std::size_t c = ring_begin_[r]; c < end; ++c) {
      const double dist = rad2deg(std::acos(std::clamp(dot(u, units_[c]), -1.0, 1.0)));
      if (dist < best || (dist == best && c < best_index)) {
        best = dist;
        best_index = c;
      }
    }
  }
  return best_index;
}

std::vector<std::size_t> SphericalGrid::neighbors(std::size_t c, double radius_deg) const {
  if (c >= points_.size()) throw std::out_of_range("grid: class index");
  if (!(radius_deg > 0.0)) throw std::invalid_argument("grid: neighbor radius must be positive");
  std::vector<std::size_t> out;
  const double el = points_[c].elevation_deg();
  for (std::size_t r = 0; r < ring_begin_.size(); ++r) {
    if (std::abs(ring_elevation_[r] - el) > radius_deg + 1e-9) continue;
    const std::size_t end = r + 1 < ring_begin_.size() ? ring_begin_[r + 1] : points_.size();
    for (std::size_t k = ring_begin_[r]; k < end; ++k) {
      if (k == c) continue;
      const double dist = rad2deg(std::acos(std::clamp(dot(units_[c], units_[k]), -1.0, 1.0)));
      if (dist <= radius_deg) out.push_back(k);
    }
  }
  return out;
}

std::string SphericalGrid::to_text() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t c = 0; c < points_.size(); ++c) {
    os << c << ' ' << points_[c].azimuth_deg() << ' ' << points_[c].elevation_deg() << '\n';
  }
  return os.str();
}

}  // namespace ambiloc
