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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ambiloc/geometry.hpp"
#include "oracles.hpp"

namespace ambiloc {
namespace {

TEST(AngularDistance, NamedCases) {
  EXPECT_NEAR(angular_distance({30, 10}, {30, 10}), 0.0, 1e-6);
  EXPECT_NEAR(angular_distance({0, 0}, {180, 0}), 180.0, 1e-12);
  EXPECT_NEAR(angular_distance({0, 0}, {90, 0}), 90.0, 1e-12);
}

TEST(AngularDistance, SymmetricAndTriangle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_direction(rng);
    const auto b = oracle::random_direction(rng);
    const auto c = oracle::random_direction(rng);
    EXPECT_DOUBLE_EQ(angular_distance(a, b), angular_distance(b, a));
    EXPECT_LE(angular_distance(a, c), angular_distance(a, b) + angular_distance(b, c) + 1e-9);
  }
}

TEST(Direction, RejectsBadAngles) {
  EXPECT_THROW(Direction(0, 91), std::invalid_argument);
  EXPECT_THROW(Direction(NAN, 0), std::invalid_argument);
  EXPECT_THROW(Direction::from_vector({0, 0, 0}), std::invalid_argument);
}

TEST(Direction, WrapsAzimuthAndCollapsesPoles) {
  EXPECT_DOUBLE_EQ(Direction(190, 0).azimuth_deg(), -170.0);
  EXPECT_DOUBLE_EQ(Direction(180, 0).azimuth_deg(), -180.0);
  EXPECT_DOUBLE_EQ(Direction(45, 90).azimuth_deg(), 0.0);
}

TEST(Direction, VectorRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto d = oracle::random_direction_within(rng, 89.0);
    const auto back = Direction::from_vector(d.unit_vector());
    EXPECT_LT(angular_distance(d, back), 1e-9);
  }
}

TEST(SphericalGrid, HandEvaluatedSizes) {
  const SphericalGrid g180(180);
  ASSERT_EQ(g180.class_count(), 2u);
  EXPECT_EQ(g180.point(0).elevation_deg(), -90.0);
  EXPECT_EQ(g180.point(1).elevation_deg(), 90.0);

  const SphericalGrid g90(90);
  ASSERT_EQ(g90.class_count(), 7u);
  EXPECT_EQ(g90.point(0).elevation_deg(), -90.0);
  const double az[] = {-180, -108, -36, 36, 108};
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(g90.point(1 + j).azimuth_deg(), az[j], 1e-9);
    EXPECT_EQ(g90.point(1 + j).elevation_deg(), 0.0);
  }
  EXPECT_EQ(g90.point(6).elevation_deg(), 90.0);
}

TEST(SphericalGrid, CountsMatchRingEnumeration) {
  EXPECT_EQ(SphericalGrid(10).class_count(), 425u);
  for (const double a : {5.0, 7.5, 10.0, 15.0, 20.0, 30.0, 45.0, 90.0, 180.0}) {
    EXPECT_EQ(SphericalGrid(a).class_count(), oracle::grid_class_count_by_rings(a)) << a;
    EXPECT_EQ(grid_class_count(a), oracle::grid_class_count_by_rings(a)) << a;
  }
}

TEST(SphericalGrid, RejectsBadResolution) {
  EXPECT_THROW(SphericalGrid(0), std::invalid_argument);
  EXPECT_THROW(SphericalGrid(-5), std::invalid_argument);
  EXPECT_THROW(SphericalGrid(180.5), std::invalid_argument);
  EXPECT_THROW(grid_class_count(0), std::invalid_argument);
}

TEST(SphericalGrid, EveryPointClassifiesToItself) {
  for (const double a : {5.0, 10.0, 15.0, 30.0, 90.0}) {
    const SphericalGrid g(a);
    for (std::size_t c = 0; c < g.class_count(); ++c) ASSERT_EQ(g.nearest_class(g.point(c)), c) << a;
  }
}

TEST(SphericalGrid, NearestClassMatchesExhaustiveArgmin) {
  std::mt19937_64 rng(5);
  for (const double a : {10.0, 30.0}) {
    const SphericalGrid g(a);
    for (int i = 0; i < 1000; ++i) {
      const auto d = oracle::random_direction(rng);
      ASSERT_EQ(g.nearest_class(d), oracle::nearest_class_exhaustive(g, d));
    }
  }
}

TEST(SphericalGrid, NearPoleGoesToPole) { EXPECT_EQ(SphericalGrid(90).nearest_class({0, 89}), 6u); }

TEST(SphericalGrid, NeighborNamedCases) {
  const SphericalGrid g90(90);
  EXPECT_EQ(g90.neighbors(6, 91), (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  const SphericalGrid g10(10);
  EXPECT_TRUE(g10.neighbors(100, 0.5).empty());
  EXPECT_EQ(g10.neighbors(100, 180).size(), g10.class_count() - 1);
  EXPECT_THROW(g10.neighbors(100, 0.0), std::invalid_argument);
  EXPECT_THROW(g10.neighbors(425, 10.0), std::out_of_range);
}

TEST(SphericalGrid, NeighborsMatchPairwiseFilter) {
  const SphericalGrid g(10);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> cls(0, g.class_count() - 1);
  std::uniform_real_distribution<double> rad(1.0, 60.0);
  for (int i = 0; i < 200; ++i) {
    const auto c = cls(rng);
    const double r = rad(rng);
    ASSERT_EQ(g.neighbors(c, r), oracle::neighbors_exhaustive(g, c, r)) << c << " r=" << r;
  }
}

TEST(SphericalGrid, MinimumSpacingBetweenHalfAndFullResolution) {
  const double m = oracle::min_pairwise_angle(SphericalGrid(10));
  EXPECT_GT(m, 5.0);
  EXPECT_LT(m, 10.0);
}

TEST(SphericalGrid, TextListsEveryClass) {
  const auto text = SphericalGrid(90).to_text();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  EXPECT_EQ(text.substr(0, 6), "0 0 -9");
}

TEST(SphericalGrid, RingOf) {
  const SphericalGrid g(90);
  EXPECT_EQ(g.ring_count(), 3u);
  EXPECT_EQ(g.ring_of(0), 0u);
  EXPECT_EQ(g.ring_of(5), 1u);
  EXPECT_EQ(g.ring_of(6), 2u);
}

}  // namespace
}  // namespace ambiloc
