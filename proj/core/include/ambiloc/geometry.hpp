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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace ambiloc {

using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);

/// A direction of arrival on the unit sphere.
///
/// Azimuth is wrapped into [-180, 180); elevation must lie in [-90, 90].
/// At the poles the azimuth carries no information and is stored as 0.
class Direction {
 public:
  Direction() = default;
  /// Throws std::invalid_argument for non-finite input or elevation outside
  /// [-90, 90].
  Direction(double azimuth_deg, double elevation_deg);

  /// Direction of a non-zero Cartesian vector (x front, y left, z up).
  static Direction from_vector(const Vec3& v);

  double azimuth_deg() const { return azimuth_; }
  double elevation_deg() const { return elevation_; }

  Vec3 unit_vector() const;

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  double azimuth_ = 0.0;
  double elevation_ = 0.0;
};

/// Great-circle angle between two directions, in degrees within [0, 180].
double angular_distance(const Direction& a, const Direction& b);

/// Quasi-uniform classification grid on the sphere.
///
/// Elevation rings are spaced 180/I degrees apart with I = floor(180/alpha);
/// ring i holds floor((360/alpha) cos(phi_i)) + 1 equally spaced azimuths
/// starting at -180. Classes are numbered ring by ring from the south pole.
class SphericalGrid {
 public:
  /// Throws std::invalid_argument unless 0 < alpha_deg <= 180.
  explicit SphericalGrid(double alpha_deg);

  double resolution_deg() const { return alpha_; }
  std::size_t class_count() const { return points_.size(); }
  const std::vector<Direction>& points() const { return points_; }
  const Direction& point(std::size_t c) const { return points_.at(c); }
  const Vec3& unit(std::size_t c) const { return units_.at(c); }

  /// Closest grid point; ties go to the lowest class index.
  std::size_t nearest_class(const Direction& d) const;

  /// All classes other than c within radius_deg of class c, ascending.
  std::vector<std::size_t> neighbors(std::size_t c, double radius_deg) const;

  std::size_t ring_count() const { return ring_begin_.size(); }
  std::size_t ring_of(std::size_t c) const;

  /// One line per class: "index azimuth_deg elevation_deg".
  std::string to_text() const;

 private:
  double alpha_;
  std::vector<Direction> points_;
  std::vector<Vec3> units_;
  std::vector<double> ring_elevation_;
  std::vector<std::size_t> ring_begin_;  // first class index of each ring
};

/// Number of classes for resolution alpha, without materializing the grid.
std::size_t grid_class_count(double alpha_deg);

}  // namespace ambiloc
