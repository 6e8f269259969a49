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

#include "ambiloc/foa.hpp"

#include <cmath>
#include <stdexcept>

namespace ambiloc {

FoaGains encode_direction(const Direction& d) {
  const double sqrt3 = std::sqrt(3.0);
  const double az = deg2rad(d.azimuth_deg());
  const double el = deg2rad(d.elevation_deg());
  return {1.0, sqrt3 * std::cos(az) * std::cos(el), sqrt3 * std::sin(az) * std::cos(el), sqrt3 * std::sin(el)};
}

FoaSignal::FoaSignal(std::size_t length, double sample_rate) : sample_rate_(sample_rate) {
  for (auto& c : channels_) c.assign(length, 0.0);
}

FoaSignal::FoaSignal(std::array<std::vector<double>, 4> channels, double sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  for (const auto& c : channels_) {
    if (c.size() != channels_[0].size()) throw std::invalid_argument("foa: channel lengths differ");
  }
}

void FoaSignal::resize(std::size_t n) {
  for (auto& c : channels_) c.resize(n, 0.0);
}

FoaSignal encode_plane_wave(std::span<const double> pressure, const Direction& d, double sample_rate) {
  if (pressure.empty()) throw std::invalid_argument("foa: empty pressure signal");
  const auto gains = encode_direction(d).as_array();
  FoaSignal out(pressure.size(), sample_rate);
  for (std::size_t ch = 0; ch < 4; ++ch) {
    auto dst = out.channel(ch);
    for (std::size_t n = 0; n < pressure.size(); ++n) dst[n] = gains[ch] * pressure[n];
  }
  return out;
}

FoaSignal mix_foa(std::span<const FoaSignal> signals) {
  if (signals.empty()) throw std::invalid_argument("foa: nothing to mix");
  std::size_t longest = 0;
  for (const auto& s : signals) {
    if (s.sample_rate() != signals[0].sample_rate()) throw std::invalid_argument("foa: sample rates differ");
    longest = std::max(longest, s.length());
  }
  FoaSignal out(longest, signals[0].sample_rate());
  for (const auto& s : signals) {
    for (std::size_t ch = 0; ch < 4; ++ch) {
      auto dst = out.channel(ch);
      const auto src = s.channel(ch);
      for (std::size_t n = 0; n < src.size(); ++n) dst[n] += src[n];
    }
  }
  return out;
}

double channel_power(const FoaSignal& s, FoaChannel ch) {
  const auto x = s.channel(ch);
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (const double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

}  // namespace ambiloc
