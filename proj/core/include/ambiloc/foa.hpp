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
#include <span>
#include <vector>

#include "ambiloc/geometry.hpp"

namespace ambiloc {

inline constexpr double kSampleRate = 16000.0;

enum class FoaChannel : std::size_t { W = 0, X = 1, Y = 2, Z = 3 };

/// Spherical-harmonic gains of a first-order plane wave, W X Y Z order,
/// with the sqrt(3) normalization on the dipoles.
struct FoaGains {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  std::array<double, 4> as_array() const { return {w, x, y, z}; }
};

FoaGains encode_direction(const Direction& d);

/// Four equal-length channels in W, X, Y, Z order.
class FoaSignal {
 public:
  FoaSignal() = default;
  FoaSignal(std::size_t length, double sample_rate = kSampleRate);
  /// Throws std::invalid_argument if the channels differ in length.
  FoaSignal(std::array<std::vector<double>, 4> channels, double sample_rate = kSampleRate);

  std::size_t length() const { return channels_[0].size(); }
  double sample_rate() const { return sample_rate_; }

  std::span<double> channel(std::size_t ch) { return channels_.at(ch); }
  std::span<const double> channel(std::size_t ch) const { return channels_.at(ch); }
  std::span<double> channel(FoaChannel ch) { return channel(static_cast<std::size_t>(ch)); }
  std::span<const double> channel(FoaChannel ch) const { return channel(static_cast<std::size_t>(ch)); }

  /// Zero-pads every channel to n samples, or truncates.
  void resize(std::size_t n);

  const std::array<std::vector<double>, 4>& channels() const { return channels_; }

  friend bool operator==(const FoaSignal&, const FoaSignal&) = default;

 private:
  std::array<std::vector<double>, 4> channels_;
  double sample_rate_ = kSampleRate;
};

/// Scales a mono pressure signal by the gains of direction d.
FoaSignal encode_plane_wave(std::span<const double> pressure, const Direction& d,
                            double sample_rate = kSampleRate);

/// Channel-wise sum after zero-padding to the longest input. Throws on
/// mismatched sample rates or an empty list.
FoaSignal mix_foa(std::span<const FoaSignal> signals);

/// Mean of squared samples of one channel; 0 for an empty signal.
double channel_power(const FoaSignal& s, FoaChannel ch = FoaChannel::W);

}  // namespace ambiloc
