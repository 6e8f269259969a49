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

#include "ambiloc/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ambiloc/fft.hpp"

namespace ambiloc {

std::vector<double> StftConfig::window() const {
  std::vector<double> w(fft_size);
  for (std::size_t n = 0; n < fft_size; ++n) {
    w[n] = std::sin(kPi * (static_cast<double>(n) + 0.5) / static_cast<double>(fft_size));
  }
  return w;
}

std::size_t StftConfig::frame_count(std::size_t n) const { return n < fft_size ? 0 : (n - fft_size) / hop + 1; }

FoaSpectrogram::FoaSpectrogram(std::size_t frames, std::size_t bins)
    : frames_(frames), bins_(bins), data_(frames * bins * 4) {}

FoaSpectrogram FoaSpectrogram::slice(std::size_t first, std::size_t count) const {
  if (first + count > frames_) throw std::out_of_range("spectrogram: slice past the last frame");
  FoaSpectrogram out(count, bins_);
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(first * bins_ * 4);
  std::copy(begin, begin + static_cast<std::ptrdiff_t>(count * bins_ * 4), out.data_.begin());
  return out;
}

FoaSpectrogram stft(const FoaSignal& s, const StftConfig& cfg) {
  const std::size_t frames = cfg.frame_count(s.length());
  if (frames == 0) throw std::invalid_argument("stft: signal shorter than one frame");
  const auto window = cfg.window();
  FoaSpectrogram out(frames, cfg.bins());
  std::vector<double> buf(cfg.fft_size);
  for (std::size_t ch = 0; ch < 4; ++ch) {
    const auto x = s.channel(ch);
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t offset = t * cfg.hop;
      for (std::size_t n = 0; n < cfg.fft_size; ++n) buf[n] = window[n] * x[offset + n];
      const auto spectrum = fft::rfft(buf, cfg.fft_size);
      for (std::size_t f = 0; f < spectrum.size(); ++f) out.at(t, f, ch) = spectrum[f];
    }
  }
  return out;
}

FoaSignal istft(const FoaSpectrogram& spec, const StftConfig& cfg) {
  if (spec.bins() != cfg.bins()) throw std::invalid_argument("istft: bin count does not match config");
  if (spec.frames() == 0) return FoaSignal(0, cfg.sample_rate);
  const auto window = cfg.window();
  FoaSignal out((spec.frames() - 1) * cfg.hop + cfg.fft_size, cfg.sample_rate);
  std::vector<fft::Complex> bins(cfg.bins());
  for (std::size_t ch = 0; ch < 4; ++ch) {
    auto y = out.channel(ch);
    for (std::size_t t = 0; t < spec.frames(); ++t) {
      for (std::size_t f = 0; f < bins.size(); ++f) bins[f] = spec.at(t, f, ch);
      const auto frame = fft::irfft(bins, cfg.fft_size);
      const std::size_t offset = t * cfg.hop;
      for (std::size_t n = 0; n < cfg.fft_size; ++n) y[offset + n] += window[n] * frame[n];
    }
  }
  return out;
}

std::vector<double> convolve_direct(std::span<const double> signal, std::span<const double> kernel) {
  if (signal.empty() || kernel.empty()) throw std::invalid_argument("convolve: empty input");
  std::vector<double> out(signal.size() + kernel.size() - 1, 0.0);
  for (std::size_t i = 0; i < signal.size(); ++i) {
    for (std::size_t k = 0; k < kernel.size(); ++k) out[i + k] += signal[i] * kernel[k];
  }
  return out;
}

std::vector<double> convolve(std::span<const double> signal, std::span<const double> kernel) {
  if (signal.empty() || kernel.empty()) throw std::invalid_argument("convolve: empty input");
  if (std::min(signal.size(), kernel.size()) <= 64) return convolve_direct(signal, kernel);
  const std::size_t out_len = signal.size() + kernel.size() - 1;
  const std::size_t n = fft::next_pow2(out_len);
  auto a = fft::rfft(signal, n);
  const auto b = fft::rfft(kernel, n);
  for (std::size_t f = 0; f < a.size(); ++f) a[f] *= b[f];
  auto out = fft::irfft(a, n);
  out.resize(out_len);
  return out;
}

FoaSignal mix_at_snr(const FoaSignal& clean, const FoaSignal& noise, double snr_db, std::uint64_t rng_seed) {
  if (clean.length() == 0) throw std::invalid_argument("mix_at_snr: empty clean signal");
  if (clean.sample_rate() != noise.sample_rate()) throw std::invalid_argument("mix_at_snr: sample rates differ");
  if (noise.length() < clean.length()) throw std::invalid_argument("mix_at_snr: noise shorter than clean signal");

  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, noise.length() - clean.length());
  const std::size_t offset = pick(rng);

  const auto noise_w = noise.channel(FoaChannel::W).subspan(offset, clean.length());
  double noise_power = 0.0;
  for (const double v : noise_w) noise_power += v * v;
  noise_power /= static_cast<double>(clean.length());
  if (!(noise_power > 0.0)) throw std::invalid_argument("mix_at_snr: noise has zero power");

  const double clean_power = channel_power(clean, FoaChannel::W);
  const double gain = std::sqrt(clean_power / (noise_power * std::pow(10.0, snr_db / 10.0)));

  FoaSignal out = clean;
  for (std::size_t ch = 0; ch < 4; ++ch) {
    auto dst = out.channel(ch);
    const auto src = noise.channel(ch).subspan(offset, clean.length());
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += gain * src[n];
  }
  return out;
}

std::vector<std::size_t> sequence_starts(std::size_t total_frames, std::size_t seq_len, std::size_t hop_frames) {
  if (seq_len == 0 || hop_frames == 0) throw std::invalid_argument("frame_sequences: zero length or hop");
  if (total_frames < seq_len) throw std::invalid_argument("frame_sequences: fewer frames than one sequence");
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + seq_len <= total_frames; s += hop_frames) starts.push_back(s);
  return starts;
}

std::vector<FoaSpectrogram> frame_sequences(const FoaSpectrogram& spec, std::size_t seq_len, std::size_t hop_frames) {
  std::vector<FoaSpectrogram> out;
  for (const std::size_t s : sequence_starts(spec.frames(), seq_len, hop_frames)) out.push_back(spec.slice(s, seq_len));
  return out;
}

}  // namespace ambiloc
