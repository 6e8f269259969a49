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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ambiloc/foa.hpp"

namespace ambiloc {

/// Speech-like test signal: syllables of glottal-pulse harmonics shaped by
/// three random formants, occasional fricative noise bursts, and short
/// pauses. Unit-less, RMS normalized to 0.1. Deterministic in seed.
std::vector<double> synthesize_utterance(double seconds, std::uint64_t seed, double sample_rate = kSampleRate);

/// A set of mono utterances at one sample rate.
class SpeechCorpus {
 public:
  /// count utterances of the given length from synthesize_utterance.
  static SpeechCorpus synthetic(std::size_t count, double seconds, std::uint64_t seed,
                                double sample_rate = kSampleRate);
  /// Every *.wav in the directory, sorted by file name. Throws if a file is
  /// not mono or its rate differs from the first one.
  static SpeechCorpus load_directory(const std::filesystem::path& dir);
  /// Writes utt_NNNN.wav files (float32 mono).
  void write_directory(const std::filesystem::path& dir) const;

  std::size_t size() const { return utterances_.size(); }
  const std::vector<double>& utterance(std::size_t i) const { return utterances_.at(i); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  double sample_rate() const { return sample_rate_; }
  /// Number of utterances with at least min_samples samples.
  std::size_t count_at_least(std::size_t min_samples) const;

 private:
  std::vector<std::vector<double>> utterances_;
  std::vector<std::string> ids_;
  double sample_rate_ = kSampleRate;
};

}  // namespace ambiloc
