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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ambiloc/foa.hpp"

namespace ambiloc {

/// 1024-point STFT with a sine window and 50% overlap. The sine window is
/// power-complementary at this hop, so it serves for analysis and synthesis.
struct StftConfig {
  std::size_t fft_size = 1024;
  std::size_t hop = 512;
  double sample_rate = kSampleRate;

  std::size_t bins() const { return fft_size / 2 + 1; }
  std::vector<double> window() const;
  /// Frames produced for a signal of n samples (0 if n < fft_size).
  std::size_t frame_count(std::size_t n) const;
};

/// Complex STFT of the four FOA channels, stored frame-major then bin, with
/// the four channel values of a bin contiguous.
class FoaSpectrogram {
 public:
  using Complex = std::complex<double>;

  FoaSpectrogram() = default;
  FoaSpectrogram(std::size_t frames, std::size_t bins);

  std::size_t frames() const { return frames_; }
  std::size_t bins() const { return bins_; }

  Complex& at(std::size_t t, std::size_t f, std::size_t ch) { return data_[(t * bins_ + f) * 4 + ch]; }
  const Complex& at(std::size_t t, std::size_t f, std::size_t ch) const { return data_[(t * bins_ + f) * 4 + ch]; }

  /// Copy of frames [first, first + count).
  FoaSpectrogram slice(std::size_t first, std::size_t count) const;

  std::span<const Complex> data() const { return data_; }

 private:
  std::size_t frames_ = 0;
  std::size_t bins_ = 0;
  std::vector<Complex> data_;
};

/// Throws std::invalid_argument for signals shorter than one frame.
FoaSpectrogram stft(const FoaSignal& s, const StftConfig& cfg = {});

/// Weighted overlap-add synthesis; output length (frames - 1) * hop + fft_size.
FoaSignal istft(const FoaSpectrogram& spec, const StftConfig& cfg = {});

/// Full linear convolution, length n + m - 1. Uses FFT block processing for
/// long kernels and the direct sum otherwise.
std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel);

/// Direct O(nm) sum; exposed for cross-checking and for short kernels.
std::vector<double> convolve_direct(std::span<const double> signal, std::span<const double> kernel);

/// Adds noise scaled so that the W-channel power ratio clean/noise equals
/// 10^(snr_db/10). A window of clean.length() samples is cut from the noise
/// at an offset drawn from rng_seed. Throws on empty clean, short or silent
/// noise, and mismatched sample rates.
FoaSignal mix_at_snr(const FoaSignal& clean, const FoaSignal& noise, double snr_db, std::uint64_t rng_seed);

inline constexpr std::size_t kSequenceFrames = 25;
inline constexpr std::size_t kSequenceHop = 12;

/// Start frames of the windows of seq_len frames spaced hop_frames apart
/// that fit entirely inside total_frames. Throws if total_frames < seq_len.
std::vector<std::size_t> sequence_starts(std::size_t total_frames, std::size_t seq_len = kSequenceFrames,
                                         std::size_t hop_frames = kSequenceHop);

std::vector<FoaSpectrogram> frame_sequences(const FoaSpectrogram& spec, std::size_t seq_len = kSequenceFrames,
                                            std::size_t hop_frames = kSequenceHop);

}  // namespace ambiloc
