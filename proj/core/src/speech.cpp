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

#include "ambiloc/speech.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "ambiloc/geometry.hpp"
#include "ambiloc/wav.hpp"

namespace ambiloc {

namespace {

constexpr double kTargetRms = 0.1;
constexpr double kEdgeSeconds = 0.015;

// Raised-cosine fade in and out over kEdgeSeconds.
double edge_envelope(std::size_t n, std::size_t length, double sample_rate) {
  const double edge = std::min(kEdgeSeconds * sample_rate, 0.5 * static_cast<double>(length));
  const double from_start = static_cast<double>(n);
  const double from_end = static_cast<double>(length - 1 - n);
  const double d = std::min(from_start, from_end);
  if (d >= edge) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * d / edge));
}

void add_voiced(std::vector<double>& out, std::size_t begin, std::size_t length, double sample_rate,
                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double f0_start = 90.0 + 150.0 * u(rng);
  const double f0_end = f0_start * (0.85 + 0.3 * u(rng));
  const double formants[3] = {300.0 + 600.0 * u(rng), 900.0 + 1600.0 * u(rng), 2300.0 + 1000.0 * u(rng)};
  const double bandwidths[3] = {80.0, 120.0, 180.0};
  const double loudness = 0.5 + u(rng);

  const int harmonics = static_cast<int>(std::floor(4000.0 / std::max(f0_start, f0_end)));
  std::vector<double> gain(static_cast<std::size_t>(harmonics));
  for (int h = 1; h <= harmonics; ++h) {
    const double f = h * 0.5 * (f0_start + f0_end);
    double g = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double r = (f - formants[k]) / bandwidths[k];
      g += 1.0 / (1.0 + r * r);
    }
    gain[static_cast<std::size_t>(h - 1)] = (g + 0.02) / std::sqrt(static_cast<double>(h));
  }

  double phase = 2.0 * kPi * u(rng);
  for (std::size_t n = 0; n < length && begin + n < out.size(); ++n) {
    const double frac = static_cast<double>(n) / static_cast<double>(length);
    phase += 2.0 * kPi * (f0_start + (f0_end - f0_start) * frac) / sample_rate;
    double s = 0.0;
    for (int h = 1; h <= harmonics; ++h) s += gain[static_cast<std::size_t>(h - 1)] * std::sin(h * phase);
    out[begin + n] += loudness * edge_envelope(n, length, sample_rate) * s;
  }
}

void add_fricative(std::vector<double>& out, std::size_t begin, std::size_t length, double sample_rate,
                   std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double previous = 0.0;
  for (std::size_t n = 0; n < length && begin + n < out.size(); ++n) {
    const double w = gauss(rng);
    out[begin + n] += 0.4 * edge_envelope(n, length, sample_rate) * (w - previous);
    previous = w;
  }
}

}  // namespace

std::vector<double> synthesize_utterance(double seconds, std::uint64_t seed, double sample_rate) {
  if (!(seconds > 0.0) || !(sample_rate > 0.0)) throw std::invalid_argument("speech: duration and rate must be positive");
  const auto total = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  std::vector<double> out(total, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const auto samples = [&](double lo, double hi) {
    return static_cast<std::size_t>((lo + (hi - lo) * u(rng)) * sample_rate);
  };
  std::size_t cursor = samples(0.0, 0.05);
  while (cursor < total) {
    if (u(rng) < 0.35) {
      const std::size_t len = samples(0.04, 0.10);
      add_fricative(out, cursor, len, sample_rate, rng);
      cursor += len;
    }
    const std::size_t len = samples(0.12, 0.30);
    add_voiced(out, cursor, len, sample_rate, rng);
    cursor += len;
    if (u(rng) < 0.8) cursor += samples(0.03, 0.15);
  }

  double power = 0.0;
  for (const double v : out) power += v * v;
  power /= static_cast<double>(std::max<std::size_t>(total, 1));
  if (power > 0.0) {
    const double scale = kTargetRms / std::sqrt(power);
    for (auto& v : out) v *= scale;
  }
  return out;
}

SpeechCorpus SpeechCorpus::synthetic(std::size_t count, double seconds, std::uint64_t seed, double sample_rate) {
  SpeechCorpus c;
  c.sample_rate_ = sample_rate;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eecu};
  std::vector<std::uint64_t> seeds(count);
  std::mt19937_64 gen(seq);
  for (auto& s : seeds) s = gen();
  for (std::size_t i = 0; i < count; ++i) {
    c.utterances_.push_back(synthesize_utterance(seconds, seeds[i], sample_rate));
    char name[32];
    std::snprintf(name, sizeof name, "utt_%04zu", i);
    c.ids_.emplace_back(name);
  }
  return c;
}

SpeechCorpus SpeechCorpus::load_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("speech corpus: not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  SpeechCorpus c;
  for (std::size_t i = 0; i < files.size(); ++i) {
    auto audio = wav::read(files[i]);
    if (audio.channels.size() != 1) throw std::invalid_argument("speech corpus: not mono: " + files[i].string());
    if (i == 0) {
      c.sample_rate_ = audio.sample_rate;
    } else if (audio.sample_rate != c.sample_rate_) {
      throw std::invalid_argument("speech corpus: sample rate differs: " + files[i].string());
    }
    c.utterances_.push_back(std::move(audio.channels[0]));
    c.ids_.push_back(files[i].stem().string());
  }
  return c;
}

void SpeechCorpus::write_directory(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < size(); ++i) wav::write_mono(dir / (ids_[i] + ".wav"), utterances_[i], sample_rate_);
}

std::size_t SpeechCorpus::count_at_least(std::size_t min_samples) const {
  return static_cast<std::size_t>(std::count_if(utterances_.begin(), utterances_.end(),
                                                [&](const auto& u) { return u.size() >= min_samples; }));
}

}  // namespace ambiloc
