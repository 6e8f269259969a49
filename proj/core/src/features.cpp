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

#include "ambiloc/features.hpp"

#include <stdexcept>

namespace ambiloc {

RawIntensity intensity_vectors(const FoaSpectrogram& slice) {
  RawIntensity out(slice.frames(), slice.bins());
  for (std::size_t t = 0; t < slice.frames(); ++t) {
    for (std::size_t f = 0; f < slice.bins(); ++f) {
      const auto w = slice.at(t, f, 0);
      for (std::size_t axis = 0; axis < 3; ++axis) {
        const auto cross = w * std::conj(slice.at(t, f, axis + 1));
        out.at(t, f, axis) = cross.real();
        out.at(t, f, axis + 3) = cross.imag();
      }
    }
  }
  return out;
}

double bin_power(const FoaSpectrogram& spec, std::size_t t, std::size_t f) {
  return std::norm(spec.at(t, f, 0)) +
         (std::norm(spec.at(t, f, 1)) + std::norm(spec.at(t, f, 2)) + std::norm(spec.at(t, f, 3))) / 3.0;
}

RawIntensity normalize_power_exact(const RawIntensity& raw, const FoaSpectrogram& slice, double eps) {
  if (raw.frames != slice.frames() || raw.bins != slice.bins()) {
    throw std::invalid_argument("normalize_power: shape mismatch");
  }
  RawIntensity out = raw;
  for (std::size_t t = 0; t < raw.frames; ++t) {
    for (std::size_t f = 0; f < raw.bins; ++f) {
      const double scale = 1.0 / (bin_power(slice, t, f) + eps);
      for (std::size_t k = 0; k < kFeatureChannels; ++k) out.at(t, f, k) *= scale;
    }
  }
  return out;
}

FeatureTensor normalize_power(const RawIntensity& raw, const FoaSpectrogram& slice, double eps) {
  const RawIntensity exact = normalize_power_exact(raw, slice, eps);
  FeatureTensor out(exact.frames, exact.bins);
  for (std::size_t i = 0; i < exact.values.size(); ++i) out.values[i] = static_cast<float>(exact.values[i]);
  return out;
}

std::vector<FeatureTensor> extract_features(const FoaSignal& s, const StftConfig& cfg, std::size_t hop_frames) {
  if (cfg.frame_count(s.length()) < kSequenceFrames) {
    throw std::invalid_argument("extract_features: signal shorter than one 25-frame sequence");
  }
  const FoaSpectrogram spec = stft(s, cfg);
  std::vector<FeatureTensor> out;
  for (const auto& slice : frame_sequences(spec, kSequenceFrames, hop_frames)) {
    out.push_back(normalize_power(intensity_vectors(slice), slice));
  }
  return out;
}

}  // namespace ambiloc
