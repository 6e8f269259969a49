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

#include <cstddef>
#include <span>
#include <vector>

#include "ambiloc/dsp.hpp"
#include "ambiloc/foa.hpp"

namespace ambiloc {

inline constexpr std::size_t kFeatureChannels = 6;
inline constexpr double kPowerEpsilon = 1e-12;

/// Per-bin active and reactive intensity, channel order
/// (Ia_x, Ia_y, Ia_z, Ir_x, Ir_y, Ir_z), stored frames x bins x 6.
template <typename T>
struct IntensityField {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<T> values;

  IntensityField() = default;
  IntensityField(std::size_t t, std::size_t f) : frames(t), bins(f), values(t * f * kFeatureChannels) {}

  T& at(std::size_t t, std::size_t f, std::size_t k) { return values[(t * bins + f) * kFeatureChannels + k]; }
  const T& at(std::size_t t, std::size_t f, std::size_t k) const {
    return values[(t * bins + f) * kFeatureChannels + k];
  }
};

using RawIntensity = IntensityField<double>;

/// Network input: power-normalized intensity, normally 25 x 513 x 6.
using FeatureTensor = IntensityField<float>;

/// Ia = Re{W X*, W Y*, W Z*}, Ir = Im{...} for every bin of the slice.
RawIntensity intensity_vectors(const FoaSpectrogram& slice);

/// |W|^2 + (|X|^2 + |Y|^2 + |Z|^2) / 3 at one bin.
double bin_power(const FoaSpectrogram& spec, std::size_t t, std::size_t f);

/// Divides each bin's 6-vector by (bin_power + eps).
RawIntensity normalize_power_exact(const RawIntensity& raw, const FoaSpectrogram& slice, double eps = kPowerEpsilon);
FeatureTensor normalize_power(const RawIntensity& raw, const FoaSpectrogram& slice, double eps = kPowerEpsilon);

/// STFT, 25-frame slicing with a 12-frame hop, then intensity and
/// normalization per slice. Throws if the signal yields fewer than 25 frames.
std::vector<FeatureTensor> extract_features(const FoaSignal& s, const StftConfig& cfg = {},
                                            std::size_t hop_frames = kSequenceHop);

}  // namespace ambiloc
