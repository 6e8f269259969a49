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

#include <gtest/gtest.h>

#include <cstdint>
#include <fstream>
#include <vector>

#include "ambiloc/wav.hpp"
#include "oracles.hpp"

namespace ambiloc {
namespace {

void put_u16(std::ofstream& o, std::uint16_t v) { o.write(reinterpret_cast<const char*>(&v), 2); }
void put_u32(std::ofstream& o, std::uint32_t v) { o.write(reinterpret_cast<const char*>(&v), 4); }

// Hand-built 16-bit PCM file, little-endian host assumed.
void write_pcm16(const std::filesystem::path& p, const std::vector<std::int16_t>& samples, std::uint16_t channels) {
  std::ofstream o(p, std::ios::binary);
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  o.write("RIFF", 4);
  put_u32(o, 36 + data_bytes);
  o.write("WAVEfmt ", 8);
  put_u32(o, 16);
  put_u16(o, 1);
  put_u16(o, channels);
  put_u32(o, 16000);
  put_u32(o, 16000u * 2u * channels);
  put_u16(o, static_cast<std::uint16_t>(2 * channels));
  put_u16(o, 16);
  o.write("data", 4);
  put_u32(o, data_bytes);
  o.write(reinterpret_cast<const char*>(samples.data()), data_bytes);
}

TEST(Wav, ReadsPcm16) {
  const auto dir = oracle::scratch_dir("wav-pcm");
  write_pcm16(dir / "a.wav", {0, 16384, -32768, 32767}, 2);
  const auto a = wav::read(dir / "a.wav");
  EXPECT_EQ(a.sample_rate, 16000.0);
  ASSERT_EQ(a.channels.size(), 2u);
  ASSERT_EQ(a.frames(), 2u);
  EXPECT_EQ(a.channels[0][0], 0.0);
  EXPECT_EQ(a.channels[1][0], 0.5);
  EXPECT_EQ(a.channels[0][1], -1.0);
  EXPECT_NEAR(a.channels[1][1], 1.0, 1e-4);
}

TEST(Wav, FloatRoundTripIsExactForFloatValues) {
  const auto dir = oracle::scratch_dir("wav-float");
  FoaSignal s(5);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < 5; ++i) s.channel(c)[i] = static_cast<float>(0.1 * c - 0.03 * i);
  }
  wav::write_foa(dir / "s.wav", s);
  EXPECT_EQ(wav::read_foa(dir / "s.wav"), s);
}

TEST(Wav, MonoHelpers) {
  const auto dir = oracle::scratch_dir("wav-mono");
  const std::vector<double> x{0.25, -0.5, 0.125};
  wav::write_mono(dir / "m.wav", x, 8000.0);
  double rate = 0;
  EXPECT_EQ(wav::read_mono(dir / "m.wav", &rate), x);
  EXPECT_EQ(rate, 8000.0);
}

TEST(Wav, Errors) {
  const auto dir = oracle::scratch_dir("wav-errors");
  EXPECT_THROW(wav::read(dir / "missing.wav"), wav::WavError);
  {
    std::ofstream o(dir / "junk.wav", std::ios::binary);
    o << "not a wave file at all";
  }
  EXPECT_THROW(wav::read(dir / "junk.wav"), wav::WavError);
  write_pcm16(dir / "stereo.wav", {1, 2, 3, 4}, 2);
  EXPECT_THROW(wav::read_foa(dir / "stereo.wav"), wav::WavError);
  {
    // Header claims more data than present.
    write_pcm16(dir / "short.wav", {1, 2, 3, 4}, 1);
    std::filesystem::resize_file(dir / "short.wav", 30);
  }
  EXPECT_THROW(wav::read(dir / "short.wav"), wav::WavError);
  wav::Audio ragged{16000.0, {{0.0, 1.0}, {0.0}}};
  EXPECT_THROW(wav::write(dir / "r.wav", ragged), wav::WavError);
}

}  // namespace
}  // namespace ambiloc
