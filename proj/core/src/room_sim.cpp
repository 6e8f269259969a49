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

#include "ambiloc/room_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ambiloc/fft.hpp"

namespace ambiloc {

namespace {

constexpr double kMinSpreadingDistance = 0.1;
constexpr int kHalfTaps = kFractionalDelayTaps / 2;
// Hann window reaches zero at |t| = kHalfTaps + 1, so all 81 taps are non-zero.
constexpr double kWindowHalfWidth = kHalfTaps + 1.0;

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

struct TapTables {
  std::array<double, kFractionalDelayTaps> cos_k{};
  std::array<double, kFractionalDelayTaps> sin_k{};
  TapTables() {
    for (int k = -kHalfTaps; k <= kHalfTaps; ++k) {
      cos_k[k + kHalfTaps] = std::cos(kPi * k / kWindowHalfWidth);
      sin_k[k + kHalfTaps] = std::sin(kPi * k / kWindowHalfWidth);
    }
  }
};

// Windowed-sinc taps for delay n0 + frac, covering samples n0-40 .. n0+40.
void fractional_delay_taps(double frac, std::array<double, kFractionalDelayTaps>& taps) {
  static const TapTables tables;
  const double sin_frac = std::sin(kPi * frac);
  const double cw = std::cos(kPi * frac / kWindowHalfWidth);
  const double sw = std::sin(kPi * frac / kWindowHalfWidth);
  for (int k = -kHalfTaps; k <= kHalfTaps; ++k) {
    const int i = k + kHalfTaps;
    const double t = k - frac;
    // cos(pi (k - frac) / W) by angle subtraction.
    const double window = 0.5 * (1.0 + tables.cos_k[i] * cw + tables.sin_k[i] * sw);
    double sinc;
    if (std::abs(t) < 1e-12) {
      sinc = 1.0;
    } else {
      // sin(pi (k - frac)) = -(-1)^k sin(pi frac)
      const double s = (k % 2 == 0) ? -sin_frac : sin_frac;
      sinc = s / (kPi * t);
    }
    taps[i] = window * sinc;
  }
}

}  // namespace

void RoomConfig::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(dimensions[a] > 0.0)) throw std::invalid_argument("room: dimensions must be positive");
    if (!(source[a] > 0.0 && source[a] < dimensions[a])) throw std::invalid_argument("room: source outside the room");
    if (!(mic[a] > 0.0 && mic[a] < dimensions[a])) throw std::invalid_argument("room: mic outside the room");
  }
  if (source == mic) throw std::invalid_argument("room: source coincides with mic");
  if (!(rt60 >= 0.0) || !std::isfinite(rt60)) throw std::invalid_argument("room: rt60 must be non-negative");
  if (!(speed_of_sound > 0.0)) throw std::invalid_argument("room: speed of sound must be positive");
}

double RoomConfig::volume() const { return dimensions[0] * dimensions[1] * dimensions[2]; }

double RoomConfig::surface_area() const {
  const auto& d = dimensions;
  return 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
}

double RoomConfig::source_distance() const { return norm(sub(source, mic)); }

Direction RoomConfig::source_direction() const { return Direction::from_vector(sub(source, mic)); }

ReflectionCoefficient reflection_coefficient(const RoomConfig& room) {
  if (!(room.rt60 > 0.0)) return {0.0, true};
  const double absorbed =
      24.0 * room.volume() * std::log(10.0) / (room.speed_of_sound * room.rt60 * room.surface_area());
  const double under_root = 1.0 - absorbed;
  if (under_root <= 0.0) return {0.0, false};
  return {std::sqrt(under_root), true};
}

ReflectionCoefficient decay_matched_reflection_coefficient(const RoomConfig& room) {
  if (!(room.rt60 > 0.0)) return {0.0, true};
  const auto& L = room.dimensions;
  // Reflections per meter of path along quasi-uniform directions.
  constexpr int kDirections = 2048;
  std::vector<double> rate(kDirections);
  double mean_rate = 0.0;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < kDirections; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / kDirections;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    rate[i] = std::abs(r * std::cos(golden * i)) / L[0] + std::abs(r * std::sin(golden * i)) / L[1] + std::abs(z) / L[2];
    mean_rate += rate[i] / kDirections;
  }
  // Schroeder curve in x = kappa t: F(x) = mean(exp(-r x) / r).
  const auto schroeder = [&](double x) {
    double f = 0.0;
    for (const double r : rate) f += std::exp(-r * x) / r;
    return f;
  };
  const double f0 = schroeder(0.0);
  const double step = 0.02 / mean_rate;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (int k = 1;; ++k) {
    const double x = k * step;
    const double db = 10.0 * std::log10(schroeder(x) / f0);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    sx += x;
    sy += db;
    sxx += x * x;
    sxy += x * db;
    ++count;
  }
  const double m = static_cast<double>(count);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double x60 = -60.0 / slope;
  const double kappa = x60 / room.rt60;
  return {std::exp(-kappa / (2.0 * room.speed_of_sound)), true};
}

ReflectionCoefficient wall_reflection(const RoomConfig& room, WallModel model) {
  return model == WallModel::Sabine ? reflection_coefficient(room) : decay_matched_reflection_coefficient(room);
}

void high_pass_in_place(std::span<double> x, double sample_rate, double cutoff_hz) {
  const double w = 2.0 * kPi * cutoff_hz / sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (auto& v : x) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

Srir simulate_srir(const RoomConfig& room, const SrirOptions& options) {
  room.validate();
  const double fs = options.sample_rate;
  const double c = room.speed_of_sound;
  const double duration = options.duration_s > 0.0 ? options.duration_s : room.rt60 + 0.1;
  const auto length = static_cast<std::size_t>(std::ceil(duration * fs));

  Srir out;
  const ReflectionCoefficient wall = wall_reflection(room, options.wall_model);
  if (!wall.attainable) throw std::invalid_argument("srir: rt60 unattainable for this room under Sabine's formula");
  out.beta = wall.beta;
  out.wall_model = options.wall_model;
  out.high_pass = options.high_pass;
  out.direct_doa = room.source_direction();
  out.direct_delay_samples = room.source_distance() / c * fs;
  if (out.direct_delay_samples >= static_cast<double>(length)) {
    throw std::invalid_argument("srir: length cap excludes the direct path");
  }
  out.response = FoaSignal(length, fs);

  const double max_delay = static_cast<double>(length - 1 + kHalfTaps);
  const double max_dist = max_delay / fs * c;
  std::array<int, 3> reach{};
  for (int a = 0; a < 3; ++a) {
    reach[a] = static_cast<int>(std::ceil(max_dist / (2.0 * room.dimensions[a]))) + 1;
  }

  std::array<double*, 4> ch{};
  for (std::size_t k = 0; k < 4; ++k) ch[k] = out.response.channel(k).data();
  std::array<double, kFractionalDelayTaps> taps{};
  const auto& L = room.dimensions;
  const auto& s = room.source;

  for (int mx = -reach[0]; mx <= reach[0]; ++mx) {
    for (int my = -reach[1]; my <= reach[1]; ++my) {
      for (int mz = -reach[2]; mz <= reach[2]; ++mz) {
        for (int q = 0; q < 8; ++q) {
          const int qx = q & 1, qy = (q >> 1) & 1, qz = (q >> 2) & 1;
          const int order = std::abs(mx - qx) + std::abs(mx) + std::abs(my - qy) + std::abs(my) +
                            std::abs(mz - qz) + std::abs(mz);
          if (options.max_order >= 0 && order > options.max_order) continue;
          if (order > 0 && out.beta == 0.0) continue;
          const Vec3 image{(1 - 2 * qx) * s[0] + 2.0 * mx * L[0], (1 - 2 * qy) * s[1] + 2.0 * my * L[1],
                           (1 - 2 * qz) * s[2] + 2.0 * mz * L[2]};
          const Vec3 v = sub(image, room.mic);
          const double d = norm(v);
          if (d == 0.0) continue;
          const double delay = d / c * fs;
          if (delay > max_delay) continue;

          const double amplitude = std::pow(out.beta, order) / (4.0 * kPi * std::max(d, kMinSpreadingDistance));
          const auto gains = encode_direction(Direction::from_vector(v)).as_array();
          const double n0 = std::floor(delay);
          fractional_delay_taps(delay - n0, taps);
          const long first = static_cast<long>(n0) - kHalfTaps;
          for (int i = 0; i < kFractionalDelayTaps; ++i) {
            const long n = first + i;
            if (n < 0 || n >= static_cast<long>(length)) continue;
            const double a = amplitude * taps[i];
            for (std::size_t k = 0; k < 4; ++k) ch[k][n] += gains[k] * a;
          }
          ++out.image_count;
        }
      }
    }
  }
  if (options.high_pass) {
    for (std::size_t k = 0; k < 4; ++k) high_pass_in_place(out.response.channel(k), fs);
  }
  return out;
}

std::optional<double> measure_rt60(std::span<const double> ir, double sample_rate) {
  if (ir.empty()) return std::nullopt;
  std::vector<double> edc(ir.size());
  double acc = 0.0;
  for (std::size_t n = ir.size(); n-- > 0;) {
    acc += ir[n] * ir[n];
    edc[n] = acc;
  }
  if (!(acc > 0.0)) return std::nullopt;
  const double total = edc[0];

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  bool reached = false;
  for (std::size_t n = 0; n < edc.size(); ++n) {
    const double db = 10.0 * std::log10(edc[n] / total);
    if (db > -5.0) continue;
    if (db < -35.0) {
      reached = true;
      break;
    }
    const double t = static_cast<double>(n) / sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++count;
  }
  if (!reached || count < 2) return std::nullopt;
  const double m = static_cast<double>(count);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (!(slope < 0.0)) return std::nullopt;
  return -60.0 / slope;
}

FoaSignal diffuse_babble(double duration_s, int n_directions, std::uint64_t rng_seed, double sample_rate) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("babble: duration must be positive");
  if (n_directions < 8) throw std::invalid_argument("babble: need at least 8 directions");
  const auto length = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  if (length == 0) throw std::invalid_argument("babble: duration shorter than one sample");
  // Shaping is circular over a power-of-two block, so the noise is periodic
  // in the block and the filter leaves no edge transient.
  const std::size_t block = fft::next_pow2(length);

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Random rotation from a uniformly drawn unit quaternion.
  const double u1 = unit(rng), u2 = unit(rng), u3 = unit(rng);
  const double qw = std::sqrt(1 - u1) * std::sin(2 * kPi * u2), qx = std::sqrt(1 - u1) * std::cos(2 * kPi * u2);
  const double qy = std::sqrt(u1) * std::sin(2 * kPi * u3), qz = std::sqrt(u1) * std::cos(2 * kPi * u3);
  const std::array<Vec3, 3> rot{{{1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw)},
                                 {2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw)},
                                 {2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy)}}};

  std::array<std::vector<double>, 4> mix;
  for (auto& m : mix) m.assign(block, 0.0);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<double> stream(block);
  for (int k = 0; k < n_directions; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n_directions;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 p{r * std::cos(golden * k), r * std::sin(golden * k), z};
    const Vec3 u{dot(rot[0], p), dot(rot[1], p), dot(rot[2], p)};
    const auto gains = encode_direction(Direction::from_vector(u)).as_array();
    for (auto& v : stream) v = gauss(rng);
    for (std::size_t ch = 0; ch < 4; ++ch) {
      for (std::size_t n = 0; n < block; ++n) mix[ch][n] += gains[ch] * stream[n];
    }
  }

  // The shaping filter is linear and shared, so it is applied once per channel
  // to the encoded sum rather than to every stream.
  std::array<std::vector<double>, 4> shaped;
  for (std::size_t ch = 0; ch < 4; ++ch) {
    auto spectrum = fft::rfft(mix[ch], block);
    for (std::size_t f = 0; f < spectrum.size(); ++f) {
      const double hz = static_cast<double>(f) * sample_rate / static_cast<double>(block);
      spectrum[f] *= hz <= 500.0 ? 1.0 : 500.0 / hz;
    }
    shaped[ch] = fft::irfft(spectrum, block);
    shaped[ch].resize(length);
  }
  FoaSignal out(std::move(shaped), sample_rate);
  const double scale = 1.0 / std::sqrt(channel_power(out, FoaChannel::W));
  for (std::size_t ch = 0; ch < 4; ++ch) {
    for (auto& v : out.channel(ch)) v *= scale;
  }
  return out;
}

std::string srir_metadata(const RoomConfig& room, const Srir& srir) {
  std::ostringstream os;
  os.precision(17);
  const auto vec = [&](const Vec3& v) {
    std::ostringstream s;
    s.precision(17);
    s << v[0] << ',' << v[1] << ',' << v[2];
    return s.str();
  };
  os << "dimensions=" << vec(room.dimensions) << '\n'
     << "rt60=" << room.rt60 << '\n'
     << "source=" << vec(room.source) << '\n'
     << "mic=" << vec(room.mic) << '\n'
     << "speed_of_sound=" << room.speed_of_sound << '\n'
     << "beta=" << srir.beta << '\n'
     << "doa_azimuth_deg=" << srir.direct_doa.azimuth_deg() << '\n'
     << "doa_elevation_deg=" << srir.direct_doa.elevation_deg() << '\n'
     << "direct_delay_samples=" << srir.direct_delay_samples << '\n'
     << "sample_rate=" << srir.response.sample_rate() << '\n'
     << "length=" << srir.response.length() << '\n'
     << "image_count=" << srir.image_count << '\n'
     << "wall_model=" << (srir.wall_model == WallModel::Sabine ? "sabine" : "decay_matched") << '\n'
     << "high_pass=" << (srir.high_pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace ambiloc
