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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambiloc/features.hpp"
#include "ambiloc/foa.hpp"
#include "ambiloc/geometry.hpp"
#include "ambiloc/speech.hpp"

namespace ambiloc {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr std::size_t kMaxSources = 3;

/// Sampling ranges for random shoebox rooms.
struct RoomRanges {
  Vec3 dims_min{3.0, 3.0, 3.0};
  Vec3 dims_max{10.0, 10.0, 10.0};
  double rt60_min = 0.2;
  double rt60_max = 0.8;
  /// Minimum distance of mic and sources from every wall.
  double wall_margin = 0.5;
  double distance_min = 1.0;
  double distance_max = 3.0;
};

enum class Split { Train, Validation, Test };

const char* split_name(Split s);
/// Throws DatasetError for anything but "train", "validation", "test".
Split parse_split(std::string_view s);

struct DatasetSpec {
  std::uint64_t seed = 1;
  /// Number of examples holding 1, 2 and 3 sources.
  std::array<std::size_t, kMaxSources> counts{0, 0, 0};
  RoomRanges room;
  double snr_min_db = 0.0;
  double snr_max_db = 20.0;
  /// Disables the diffuse babble altogether (the SNR is then reported as
  /// infinite).
  bool add_noise = true;
  double min_separation_deg = 20.0;
  /// Directory of mono WAVE files; empty selects a synthetic corpus.
  std::filesystem::path corpus;
  std::size_t synthetic_corpus_size = 48;
  double synthetic_corpus_seconds = 3.0;
  double train_ratio = 0.8;
  double validation_ratio = 0.1;
  double test_ratio = 0.1;
  double grid_alpha = 10.0;
  /// 1.216 s gives 37 STFT frames, hence two 25-frame sequences at hop 12.
  double excerpt_s = 1.216;
  int babble_directions = 32;
  /// Cap on simulated SRIR length; non-positive keeps rt60 + 0.1 s.
  double srir_max_seconds = 0.5;
  int max_room_retries = 100;

  /// Throws DatasetError for degenerate ranges, ratios not summing to 1,
  /// or negative settings.
  void validate() const;
  std::size_t example_count() const;
  /// Source count (1..3) of example `index`; examples are ordered by count.
  std::size_t sources_of(std::size_t index) const;
  std::size_t excerpt_samples() const;
};

struct Provenance {
  std::size_t example = 0;
  std::size_t room_id = 0;
  Vec3 room_dims{};
  double rt60 = 0.0;
  double snr_db = 0.0;
  /// Corpus utterance id and sample offset of each source excerpt.
  std::vector<std::string> source_ids;
  std::vector<std::size_t> source_offsets;
};

/// One rendered mixture before feature extraction.
struct ExampleAudio {
  FoaSignal mixture;
  std::vector<Direction> truth;
  Provenance provenance;
};

struct LabeledSequence {
  std::string id;
  FeatureTensor features;
  /// One entry per grid class, 1 at nearest_class of every truth direction.
  std::vector<float> target;
  std::vector<Direction> truth;
  Provenance provenance;
  Split split = Split::Train;
};

/// The speech corpus named by spec.corpus, or the synthetic one. Throws
/// DatasetError when fewer than 3 utterances can hold an excerpt.
SpeechCorpus corpus_for(const DatasetSpec& spec);

/// Samples a room, 1-3 sources at least min_separation_deg apart, simulates
/// and convolves, then adds babble. Deterministic in (spec.seed, index).
ExampleAudio render_example(const DatasetSpec& spec, const SpeechCorpus& corpus, std::size_t index);

/// 0/1 vector over the grid with ones at the nearest classes of truth.
/// Throws DatasetError if two directions share a class.
std::vector<float> make_target(const SphericalGrid& grid, const std::vector<Direction>& truth);

/// Split of every example, stratified by source count.
std::vector<Split> assign_splits(const DatasetSpec& spec);

/// Renders and labels every example in memory, in example order.
std::vector<LabeledSequence> synthesize_sequences(const DatasetSpec& spec, int jobs = 1);

struct DatasetSummary {
  std::size_t examples = 0;
  std::size_t sequences = 0;
  std::array<std::size_t, 3> per_split{0, 0, 0};
};

inline constexpr const char* kFeatureFileName = "features.ambt";
inline constexpr const char* kManifestFileName = "manifest.tsv";

/// Writes features.ambt and manifest.tsv under dir. Examples are rendered
/// in chunks on `jobs` threads and serialized in example order, so the
/// output bytes do not depend on `jobs`.
DatasetSummary generate_dataset(const DatasetSpec& spec, const std::filesystem::path& dir, int jobs = 1);

/// Writes already-labeled sequences; used by generate_dataset and tests.
void write_dataset(const std::filesystem::path& dir, const std::vector<LabeledSequence>& sequences,
                   const DatasetSpec& spec);

struct ManifestRecord {
  std::string id;
  std::string file;
  std::uint64_t offset = 0;
  std::size_t n_sources = 0;
  double snr_db = 0.0;
  std::vector<Direction> truth;
  std::uint32_t checksum = 0;
  Split split = Split::Train;
  Provenance provenance;
};

/// Read-only view of a persisted dataset.
class Dataset {
 public:
  /// Parses the manifest; throws DatasetError on a missing or malformed
  /// manifest or a format version mismatch.
  static Dataset open(const std::filesystem::path& dir);

  const std::vector<ManifestRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t class_count() const { return class_count_; }
  double grid_alpha() const { return grid_alpha_; }

  /// Loads record i and verifies its checksum. Errors name the record index.
  LabeledSequence load(std::size_t i) const;
  std::vector<LabeledSequence> load(const std::vector<std::size_t>& indices) const;

  /// Record indices in manifest order, optionally restricted to a split.
  std::vector<std::size_t> indices(std::optional<Split> split = std::nullopt) const;
  /// The same indices in an order shuffled by seed.
  std::vector<std::size_t> shuffled(std::uint64_t seed, std::optional<Split> split = std::nullopt) const;

 private:
  std::filesystem::path dir_;
  std::vector<ManifestRecord> records_;
  std::size_t class_count_ = 0;
  double grid_alpha_ = 0.0;
};

}  // namespace ambiloc
