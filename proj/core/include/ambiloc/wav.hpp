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

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "ambiloc/foa.hpp"

namespace ambiloc::wav {

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Audio {
  double sample_rate = 0.0;
  std::vector<std::vector<double>> channels;

  std::size_t frames() const { return channels.empty() ? 0 : channels[0].size(); }
};

/// Reads RIFF/WAVE with 16/24/32-bit integer PCM or 32/64-bit float
/// samples, plain or WAVE_FORMAT_EXTENSIBLE. Integer samples map to [-1, 1).
Audio read(const std::filesystem::path& path);

/// Writes 32-bit IEEE float samples.
void write(const std::filesystem::path& path, const Audio& audio);

/// 4-channel W,X,Y,Z file. Throws WavError for any other channel count.
FoaSignal read_foa(const std::filesystem::path& path);
void write_foa(const std::filesystem::path& path, const FoaSignal& signal);

/// First channel of a file, for mono speech corpora.
std::vector<double> read_mono(const std::filesystem::path& path, double* sample_rate = nullptr);
void write_mono(const std::filesystem::path& path, std::span<const double> samples, double sample_rate);

}  // namespace ambiloc::wav
