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

#include "ambiloc/features.hpp"
#include "oracles.hpp"

namespace ambiloc {
namespace {

FoaSpectrogram single_bin(std::complex<double> p, const Direction& d) {
  FoaSpectrogram s(1, 1);
  const auto g = encode_direction(d).as_array();
  for (std::size_t c = 0; c < 4; ++c) s.at(0, 0, c) = g[c] * p;
  return s;
}

TEST(Intensity, PlaneWaveBin) {
  const Direction d{-63, 21};
  const auto u = d.unit_vector();
  const auto raw = intensity_vectors(single_bin({1.7, 0.0}, d));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(raw.at(0, 0, k), std::sqrt(3.0) * 1.7 * 1.7 * u[k], 1e-12);
    EXPECT_NEAR(raw.at(0, 0, 3 + k), 0.0, 1e-12);
  }
}

TEST(Intensity, ZeroWGivesZero) {
  FoaSpectrogram s(1, 1);
  s.at(0, 0, 1) = {1.0, 2.0};
  s.at(0, 0, 3) = {-1.0, 0.5};
  const auto raw = intensity_vectors(s);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(raw.at(0, 0, k), 0.0);
}

TEST(Intensity, NegatingXNegatesOnlyXFeatures) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 1);
  FoaSpectrogram s(2, 3);
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t f = 0; f < 3; ++f) {
      for (std::size_t c = 0; c < 4; ++c) s.at(t, f, c) = {g(rng), g(rng)};
    }
  }
  auto flipped = s;
  for (std::size_t t = 0; t < 2; ++t) {
    for (std::size_t f = 0; f < 3; ++f) flipped.at(t, f, 1) = -flipped.at(t, f, 1);
  }
  const auto a = intensity_vectors(s), b = intensity_vectors(flipped);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const std::size_t k = i % 6;
    EXPECT_EQ(b.values[i], (k == 0 || k == 3) ? -a.values[i] : a.values[i]);
  }
}

TEST(Normalize, PlaneWaveHasNormRootThreeOverTwo) {
  const Direction d{140, -35};
  const auto s = single_bin({0.3, -0.4}, d);
  EXPECT_NEAR(bin_power(s, 0, 0), 2.0 * 0.25, 1e-15);
  const auto n = normalize_power_exact(intensity_vectors(s), s);
  const auto u = d.unit_vector();
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(n.at(0, 0, k), std::sqrt(3.0) / 2.0 * u[k], 1e-9);
}

TEST(Normalize, ZeroBinStaysZero) {
  const FoaSpectrogram s(1, 2);
  const auto n = normalize_power(intensity_vectors(s), s);
  for (const float v : n.values) {
    EXPECT_FALSE(std::isnan(v));
    EXPECT_EQ(v, 0.0f);
  }
}

TEST(Normalize, ShapeMismatchThrows) {
  EXPECT_THROW(normalize_power(intensity_vectors(FoaSpectrogram(1, 2)), FoaSpectrogram(1, 3)),
               std::invalid_argument);
}

TEST(Normalize, DegreeZeroHomogeneousAndBounded) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 1);
  FoaSpectrogram s(4, 16);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t f = 0; f < 16; ++f) {
      for (std::size_t c = 0; c < 4; ++c) s.at(t, f, c) = {g(rng), g(rng)};
    }
  }
  auto scaled = s;
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t f = 0; f < 16; ++f) {
      for (std::size_t c = 0; c < 4; ++c) scaled.at(t, f, c) *= 5.0;
    }
  }
  const auto a = normalize_power_exact(intensity_vectors(s), s);
  const auto b = normalize_power_exact(intensity_vectors(scaled), scaled);
  for (std::size_t i = 0; i < a.values.size(); ++i) EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t f = 0; f < 16; ++f) {
      double sq = 0.0;
      for (std::size_t k = 0; k < 6; ++k) sq += a.at(t, f, k) * a.at(t, f, k);
      EXPECT_LE(std::sqrt(sq), 2.0);
    }
  }
}

TEST(ExtractFeatures, ShapeAndSilence) {
  const auto feats = extract_features(FoaSignal(19456));
  ASSERT_EQ(feats.size(), 2u);
  for (const auto& x : feats) {
    EXPECT_EQ(x.frames, 25u);
    EXPECT_EQ(x.bins, 513u);
    EXPECT_EQ(x.values.size(), 25u * 513u * 6u);
    for (const float v : x.values) ASSERT_EQ(v, 0.0f);
  }
  EXPECT_THROW(extract_features(FoaSignal(12000)), std::invalid_argument);
}

TEST(ExtractFeatures, GainInvariant) {
  const auto s = oracle::plane_wave_speech({20, 10}, 1.0, 3);
  auto loud = s;
  for (std::size_t c = 0; c < 4; ++c) {
    for (auto& v : loud.channel(c)) v *= -7.0;
  }
  const auto a = extract_features(s), b = extract_features(loud);
  ASSERT_EQ(a.size(), b.size());
  // Invariance holds where the 1e-12 power floor is negligible.
  const auto spec = stft(s);
  std::size_t compared = 0;
  for (std::size_t t = 0; t < kSequenceFrames; ++t) {
    for (std::size_t f = 0; f < spec.bins(); ++f) {
      if (bin_power(spec, t, f) < 1e-6) continue;
      for (std::size_t k = 0; k < kFeatureChannels; ++k) ASSERT_NEAR(a[0].at(t, f, k), b[0].at(t, f, k), 1e-5);
      ++compared;
    }
  }
  EXPECT_GT(compared, 1000u);
}

TEST(ExtractFeatures, PlaneWaveBinsPointAtSource) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = oracle::random_direction_within(rng, 80.0);
    const auto s = oracle::plane_wave_speech(d, 1.216, 10 + trial);
    const auto spec = stft(s);
    const auto slice = spec.slice(0, 25);
    const auto feats = normalize_power_exact(intensity_vectors(slice), slice);
    std::vector<double> power;
    for (std::size_t t = 0; t < 25; ++t) {
      for (std::size_t f = 0; f < 513; ++f) power.push_back(bin_power(slice, t, f));
    }
    auto sorted = power;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::size_t counted = 0, hits = 0;
    for (std::size_t t = 0; t < 25; ++t) {
      for (std::size_t f = 0; f < 513; ++f) {
        if (!(power[t * 513 + f] > median)) continue;
        ++counted;
        const double x = feats.at(t, f, 0), y = feats.at(t, f, 1), z = feats.at(t, f, 2);
        const Direction est(rad2deg(std::atan2(y, x)),
                            rad2deg(std::asin(std::clamp(z / std::sqrt(x * x + y * y + z * z), -1.0, 1.0))));
        hits += angular_distance(est, d) < 2.0;
      }
    }
    EXPECT_GE(static_cast<double>(hits), 0.95 * static_cast<double>(counted));
  }
}

}  // namespace
}  // namespace ambiloc
