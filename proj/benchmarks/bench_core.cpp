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

// Throughput of the hot paths: analysis, simulation, network and decoding.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "ambiloc/decode.hpp"
#include "ambiloc/dsp.hpp"
#include "ambiloc/features.hpp"
#include "ambiloc/foa.hpp"
#include "ambiloc/network.hpp"
#include "ambiloc/room_sim.hpp"

namespace ambiloc {
namespace {

FoaSignal noise_plane_wave(double seconds) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<double> p(static_cast<std::size_t>(seconds * kSampleRate));
  for (auto& v : p) v = n(rng);
  return encode_plane_wave(p, {40.0, 15.0});
}

FeatureTensor random_features() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(-0.8f, 0.8f);
  FeatureTensor x(kSequenceFrames, 513);
  for (auto& v : x.values) v = u(rng);
  return x;
}

void BM_Stft(benchmark::State& state) {
  const auto s = noise_plane_wave(1.216);
  for (auto _ : state) benchmark::DoNotOptimize(stft(s));
}
BENCHMARK(BM_Stft)->Unit(benchmark::kMillisecond);

void BM_ExtractFeatures(benchmark::State& state) {
  const auto s = noise_plane_wave(1.216);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(s));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

void BM_SimulateSrir(benchmark::State& state) {
  RoomConfig room;
  room.rt60 = static_cast<double>(state.range(0)) / 1000.0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_srir(room));
}
BENCHMARK(BM_SimulateSrir)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_ConvolveSrir(benchmark::State& state) {
  RoomConfig room;
  room.rt60 = 0.4;
  const auto h = simulate_srir(room).response;
  const auto s = noise_plane_wave(1.216);
  for (auto _ : state) benchmark::DoNotOptimize(convolve(s.channel(0), h.channel(0)));
}
BENCHMARK(BM_ConvolveSrir)->Unit(benchmark::kMillisecond);

void BM_ForwardReduced(benchmark::State& state) {
  const auto params = NetworkParams<float>::initialized(reduced_config(51), 3);
  const auto x = random_features();
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, x));
}
BENCHMARK(BM_ForwardReduced)->Unit(benchmark::kMillisecond);

void BM_ForwardPublished42(benchmark::State& state) {
  const auto params = NetworkParams<float>::initialized(named_config("4-2", 425), 3);
  const auto x = random_features();
  for (auto _ : state) benchmark::DoNotOptimize(forward(params, x));
}
BENCHMARK(BM_ForwardPublished42)->Unit(benchmark::kMillisecond);

void BM_LossAndGradientsReduced(benchmark::State& state) {
  const auto params = NetworkParams<float>::initialized(reduced_config(51), 3);
  const auto x = random_features();
  std::vector<float> y(51, 0.0f);
  y[7] = 1.0f;
  const std::vector<BatchItem> batch{{&x, y}};
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradients(params, std::span<const BatchItem>(batch)));
}
BENCHMARK(BM_LossAndGradientsReduced)->Unit(benchmark::kMillisecond);

void BM_PeakPick(benchmark::State& state) {
  const SphericalGrid grid(10.0);
  const PeakPicker picker(grid);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(grid.class_count());
  for (auto& v : scores) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(picker.pick(scores, KnownCount{3}));
}
BENCHMARK(BM_PeakPick)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace ambiloc

BENCHMARK_MAIN();
