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

#include "ambiloc/wav.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace ambiloc::wav {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little, "WAVE I/O assumes a little-endian host");

std::uint16_t u16(const char* p) {
  std::uint16_t v;
  std::memcpy(&v, p, 2);
  return v;
}
std::uint32_t u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

double decode_sample(const char* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    if (bits == 32) {
      float f;
      std::memcpy(&f, p, 4);
      return f;
    }
    double d;
    std::memcpy(&d, p, 8);
    return d;
  }
  switch (bits) {
    case 16:
      return static_cast<std::int16_t>(u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = (static_cast<unsigned char>(p[0])) | (static_cast<unsigned char>(p[1]) << 8) |
                       (static_cast<unsigned char>(p[2]) << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    default:
      return static_cast<std::int32_t>(u32(p)) / 2147483648.0;
  }
}

}  // namespace

Audio read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("wav: cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw WavError("wav: not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = bytes.data() + pos;
    const std::size_t size = u32(id + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw WavError("wav: truncated fmt chunk");
      format = u16(bytes.data() + body);
      channels = u16(bytes.data() + body + 2);
      rate = u32(bytes.data() + body + 4);
      bits = u16(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        if (size < 26) throw WavError("wav: truncated extensible fmt chunk");
        format = u16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min(size, bytes.size() - body);
    }
    pos = body + size + (size & 1u);
  }
  if (channels == 0 || data == nullptr) throw WavError("wav: missing fmt or data chunk in " + path.string());
  const bool supported = (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32)) ||
                         (format == kFormatFloat && (bits == 32 || bits == 64));
  if (!supported) throw WavError("wav: unsupported sample format in " + path.string());

  const std::size_t stride = static_cast<std::size_t>(bits / 8) * channels;
  const std::size_t frames = data_size / stride;
  Audio audio;
  audio.sample_rate = rate;
  audio.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      audio.channels[c][n] = decode_sample(data + n * stride + c * (bits / 8), format, bits);
    }
  }
  return audio;
}

void write(const std::filesystem::path& path, const Audio& audio) {
  if (audio.channels.empty()) throw WavError("wav: no channels to write");
  const std::size_t frames = audio.frames();
  for (const auto& c : audio.channels) {
    if (c.size() != frames) throw WavError("wav: channel lengths differ");
  }
  const auto channels = static_cast<std::uint16_t>(audio.channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * channels * 4);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw WavError("wav: cannot create " + path.string());
  os.write("RIFF", 4);
  put<std::uint32_t>(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  put<std::uint32_t>(os, 16);
  put<std::uint16_t>(os, kFormatFloat);
  put<std::uint16_t>(os, channels);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(audio.sample_rate));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(audio.sample_rate) * channels * 4);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(channels * 4));
  put<std::uint16_t>(os, 32);
  os.write("data", 4);
  put<std::uint32_t>(os, data_bytes);
  for (std::size_t n = 0; n < frames; ++n) {
    for (const auto& c : audio.channels) put<float>(os, static_cast<float>(c[n]));
  }
  if (!os) throw WavError("wav: write failed for " + path.string());
}

FoaSignal read_foa(const std::filesystem::path& path) {
  Audio a = read(path);
  if (a.channels.size() != 4) throw WavError("wav: expected 4 channels (W,X,Y,Z) in " + path.string());
  return FoaSignal({std::move(a.channels[0]), std::move(a.channels[1]), std::move(a.channels[2]),
                    std::move(a.channels[3])},
                   a.sample_rate);
}

void write_foa(const std::filesystem::path& path, const FoaSignal& signal) {
  Audio a;
  a.sample_rate = signal.sample_rate();
  for (const auto& c : signal.channels()) a.channels.push_back(c);
  write(path, a);
}

std::vector<double> read_mono(const std::filesystem::path& path, double* sample_rate) {
  Audio a = read(path);
  if (sample_rate) *sample_rate = a.sample_rate;
  return std::move(a.channels.front());
}

void write_mono(const std::filesystem::path& path, std::span<const double> samples, double sample_rate) {
  Audio a;
  a.sample_rate = sample_rate;
  a.channels.emplace_back(samples.begin(), samples.end());
  write(path, a);
}

}  // namespace ambiloc::wav
