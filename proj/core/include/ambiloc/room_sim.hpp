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

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "ambiloc/foa.hpp"
#include "ambiloc/geometry.hpp"

namespace ambiloc {

/// A rectangular room with one source and one FOA microphone. Coordinates
/// are in meters with the origin at a room corner.
struct RoomConfig {
  Vec3 dimensions{6.0, 5.0, 3.0};
  double rt60 = 0.5;
  Vec3 source{2.0, 2.0, 1.5};
  Vec3 mic{4.0, 3.0, 1.5};
  double speed_of_sound = 343.0;

  /// Throws std::invalid_argument if a position is outside the room, the
  /// source coincides with the mic, or rt60 is negative.
  void validate() const;

  double volume() const;
  double surface_area() const;
  double source_distance() const;
  /// Direction of the source as seen from the mic.
  Direction source_direction() const;
};

struct ReflectionCoefficient {
  double beta = 0.0;
  /// False when the room is too absorbent for the requested RT60 under
  /// Sabine's formula; beta is then 0.
  bool attainable = true;
};

/// Uniform wall pressure-reflection coefficient from inverse Sabine:
/// beta = sqrt(1 - 24 V ln(10) / (c T60 S)).
ReflectionCoefficient reflection_coefficient(const RoomConfig& room);

/// Uniform coefficient whose image-source energy decay has the requested
/// RT60. With n_a reflections per meter |u_a| / L_a along direction u, the
/// decay is the direction average of exp(-kappa r_u t), kappa = -2 c ln(beta).
/// Its Schroeder curve is fitted between -5 and -35 dB like measure_rt60,
/// which fixes kappa and hence beta. Always attainable for rt60 > 0.
ReflectionCoefficient decay_matched_reflection_coefficient(const RoomConfig& room);

enum class WallModel { DecayMatched, Sabine };

ReflectionCoefficient wall_reflection(const RoomConfig& room, WallModel model);

/// Allen-Berkley DC-blocking high-pass (default 100 Hz cut-off), in place.
void high_pass_in_place(std::span<double> x, double sample_rate, double cutoff_hz = 100.0);

struct SrirOptions {
  /// Highest reflection order kept; negative means limited only by length.
  int max_order = -1;
  /// Response length in seconds; non-positive selects rt60 + 0.1 s.
  double duration_s = 0.0;
  double sample_rate = kSampleRate;
  WallModel wall_model = WallModel::DecayMatched;
  /// Removes the low-frequency build-up of equal-sign image amplitudes,
  /// which otherwise lengthens the measured decay.
  bool high_pass = true;
};

struct Srir {
  FoaSignal response;
  Direction direct_doa;
  /// Direct-path delay ||source - mic|| / c in (fractional) samples.
  double direct_delay_samples = 0.0;
  double beta = 0.0;
  std::size_t image_count = 0;
  WallModel wall_model = WallModel::DecayMatched;
  bool high_pass = true;
};

inline constexpr int kFractionalDelayTaps = 81;

/// Image-source FOA room impulse response. Each image contributes
/// beta^reflections / (4 pi d) times a Hann-windowed sinc fractional delay,
/// encoded with the FOA gains of its direction seen from the mic; then the
/// optional high-pass runs on every channel. Throws if the length cap would
/// exclude the direct path or the RT60 is unattainable under the model.
Srir simulate_srir(const RoomConfig& room, const SrirOptions& options = {});

/// Reverberation time from Schroeder backward integration, with a linear
/// fit of the decay curve between -5 and -35 dB. Returns nullopt when the
/// curve never reaches -35 dB or the fit slope is not negative.
std::optional<double> measure_rt60(std::span<const double> impulse_response, double sample_rate = kSampleRate);

/// Sum of n_directions speech-shaped noise streams (flat to 500 Hz, then
/// -6 dB/octave) arriving as plane waves from a randomly rotated Fibonacci
/// lattice. The W channel is scaled to unit mean power.
FoaSignal diffuse_babble(double duration_s, int n_directions, std::uint64_t rng_seed,
                         double sample_rate = kSampleRate);

/// key=value lines describing the room and the direct path.
std::string srir_metadata(const RoomConfig& room, const Srir& srir);

}  // namespace ambiloc
