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

#include "ambiloc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ambiloc/dsp.hpp"
#include "ambiloc/parallel.hpp"
#include "ambiloc/room_sim.hpp"
#include "ambiloc/tensor_io.hpp"

namespace ambiloc {

namespace {

constexpr std::size_t kChunkExamples = 32;
constexpr int kSourceDrawAttempts = 200;
constexpr std::uint64_t kCorpusSeedSalt = 0xC0C0C0C0ull;

std::mt19937_64 example_rng(std::uint64_t seed, std::size_t index, std::uint32_t stream) {
  const auto i = static_cast<std::uint64_t>(index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32), stream};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    const Vec3 v{g(rng), g(rng), g(rng)};
    const double n = norm(v);
    if (n > 1e-9) return {v[0] / n, v[1] / n, v[2] / n};
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw DatasetError(where + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end == s.c_str() || *end != '\0') throw DatasetError(where + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::string record_id(std::size_t example, std::size_t sequence) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "ex%06zu-s%zu", example, sequence);
  return buf;
}

}  // namespace

const char* split_name(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Validation:
      return "validation";
    case Split::Test:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw DatasetError("unknown split '" + std::string(s) + "'");
}

void DatasetSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (!(room.dims_min[a] > 0.0 && room.dims_min[a] <= room.dims_max[a])) {
      throw DatasetError("dataset: room dimension range must satisfy 0 < min <= max");
    }
    if (!(room.dims_min[a] > 2.0 * room.wall_margin)) {
      throw DatasetError("dataset: smallest room leaves no space inside the wall margin");
    }
  }
  if (!(room.rt60_min >= 0.0 && room.rt60_min <= room.rt60_max)) throw DatasetError("dataset: bad rt60 range");
  if (!(room.wall_margin >= 0.0)) throw DatasetError("dataset: wall margin must be non-negative");
  if (!(room.distance_min > 0.0 && room.distance_min <= room.distance_max)) {
    throw DatasetError("dataset: bad source distance range");
  }
  if (!(snr_min_db <= snr_max_db)) throw DatasetError("dataset: bad SNR range");
  if (!(min_separation_deg >= 0.0 && min_separation_deg < 180.0)) throw DatasetError("dataset: bad separation");
  for (const double r : {train_ratio, validation_ratio, test_ratio}) {
    if (!(r >= 0.0 && r <= 1.0)) throw DatasetError("dataset: split ratios must lie in [0, 1]");
  }
  if (std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-6) {
    throw DatasetError("dataset: split ratios must sum to 1");
  }
  if (!(grid_alpha > 0.0 && grid_alpha <= 180.0)) throw DatasetError("dataset: grid resolution must lie in (0, 180]");
  if (!(excerpt_s > 0.0)) throw DatasetError("dataset: excerpt length must be positive");
  if (StftConfig{}.frame_count(excerpt_samples()) < kSequenceFrames) {
    throw DatasetError("dataset: excerpt too short for one 25-frame sequence");
  }
  if (babble_directions < 8) throw DatasetError("dataset: need at least 8 babble directions");
  if (max_room_retries < 1) throw DatasetError("dataset: max_room_retries must be positive");
  if (corpus.empty() && !(synthetic_corpus_seconds >= excerpt_s)) {
    throw DatasetError("dataset: synthetic utterances shorter than the excerpt");
  }
}

std::size_t DatasetSpec::example_count() const { return counts[0] + counts[1] + counts[2]; }

std::size_t DatasetSpec::sources_of(std::size_t index) const {
  std::size_t end = 0;
  for (std::size_t k = 0; k < kMaxSources; ++k) {
    end += counts[k];
    if (index < end) return k + 1;
  }
  throw DatasetError("dataset: example index out of range");
}

std::size_t DatasetSpec::excerpt_samples() const {
  return static_cast<std::size_t>(std::llround(excerpt_s * kSampleRate));
}

SpeechCorpus corpus_for(const DatasetSpec& spec) {
  SpeechCorpus corpus = spec.corpus.empty()
                            ? SpeechCorpus::synthetic(spec.synthetic_corpus_size, spec.synthetic_corpus_seconds,
                                                      spec.seed ^ kCorpusSeedSalt)
                            : SpeechCorpus::load_directory(spec.corpus);
  if (corpus.sample_rate() != kSampleRate) throw DatasetError("dataset: corpus must be sampled at 16 kHz");
  if (corpus.count_at_least(spec.excerpt_samples()) < kMaxSources) {
    throw DatasetError("dataset: corpus too small: need at least 3 utterances of " + format_double(spec.excerpt_s) +
                       " s");
  }
  return corpus;
}

ExampleAudio render_example(const DatasetSpec& spec, const SpeechCorpus& corpus, std::size_t index) {
  const std::size_t n_sources = spec.sources_of(index);
  const std::size_t excerpt = spec.excerpt_samples();
  auto rng = example_rng(spec.seed, index, 1);
  const auto& R = spec.room;

  RoomConfig room;
  std::vector<Vec3> sources;
  bool placed = false;
  for (int attempt = 0; attempt < spec.max_room_retries && !placed; ++attempt) {
    for (int a = 0; a < 3; ++a) room.dimensions[a] = uniform(rng, R.dims_min[a], R.dims_max[a]);
    room.rt60 = uniform(rng, R.rt60_min, R.rt60_max);
    if (!wall_reflection(room, WallModel::DecayMatched).attainable) continue;
    for (int a = 0; a < 3; ++a) room.mic[a] = uniform(rng, R.wall_margin, room.dimensions[a] - R.wall_margin);

    sources.clear();
    for (std::size_t k = 0; k < n_sources; ++k) {
      bool found = false;
      for (int t = 0; t < kSourceDrawAttempts && !found; ++t) {
        const Vec3 u = random_unit(rng);
        const double d = uniform(rng, R.distance_min, R.distance_max);
        const Vec3 p{room.mic[0] + d * u[0], room.mic[1] + d * u[1], room.mic[2] + d * u[2]};
        bool inside = true;
        for (int a = 0; a < 3; ++a) {
          inside = inside && p[a] >= R.wall_margin && p[a] <= room.dimensions[a] - R.wall_margin;
        }
        if (!inside) continue;
        const Direction dir = Direction::from_vector(u);
        bool separated = true;
        for (const auto& q : sources) {
          const Direction other = Direction::from_vector({q[0] - room.mic[0], q[1] - room.mic[1], q[2] - room.mic[2]});
          separated = separated && angular_distance(dir, other) >= spec.min_separation_deg;
        }
        if (!separated) continue;
        sources.push_back(p);
        found = true;
      }
      if (!found) break;
    }
    placed = sources.size() == n_sources;
  }
  if (!placed) {
    throw DatasetError("dataset: example " + std::to_string(index) + ": no valid room after " +
                       std::to_string(spec.max_room_retries) + " attempts");
  }

  // Distinct utterances long enough for the excerpt.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus.utterance(i).size() >= excerpt) eligible.push_back(i);
  }
  ExampleAudio out;
  out.provenance.example = index;
  out.provenance.room_id = index;
  out.provenance.room_dims = room.dimensions;
  out.provenance.rt60 = room.rt60;

  SrirOptions srir_opts;
  if (spec.srir_max_seconds > 0.0) srir_opts.duration_s = std::min(room.rt60 + 0.1, spec.srir_max_seconds);

  FoaSignal clean(excerpt);
  for (std::size_t k = 0; k < n_sources; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, eligible.size() - 1);
    std::swap(eligible[k], eligible[pick(rng)]);
    const auto& utt = corpus.utterance(eligible[k]);
    std::uniform_int_distribution<std::size_t> off(0, utt.size() - excerpt);
    const std::size_t offset = off(rng);
    const std::span<const double> dry(utt.data() + offset, excerpt);

    room.source = sources[k];
    const Srir srir = simulate_srir(room, srir_opts);
    for (std::size_t ch = 0; ch < 4; ++ch) {
      const auto wet = convolve(dry, srir.response.channel(ch));
      auto dst = clean.channel(ch);
      for (std::size_t n = 0; n < excerpt; ++n) dst[n] += wet[n];
    }
    out.truth.push_back(srir.direct_doa);
    out.provenance.source_ids.push_back(corpus.id(eligible[k]));
    out.provenance.source_offsets.push_back(offset);
  }

  if (spec.add_noise) {
    const double snr = uniform(rng, spec.snr_min_db, spec.snr_max_db);
    const std::uint64_t babble_seed = rng();
    const std::uint64_t crop_seed = rng();
    const FoaSignal babble =
        diffuse_babble(static_cast<double>(excerpt) / kSampleRate, spec.babble_directions, babble_seed);
    out.mixture = mix_at_snr(clean, babble, snr, crop_seed);
    out.provenance.snr_db = snr;
  } else {
    out.mixture = std::move(clean);
    out.provenance.snr_db = std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<float> make_target(const SphericalGrid& grid, const std::vector<Direction>& truth) {
  std::vector<float> y(grid.class_count(), 0.0f);
  for (const auto& d : truth) {
    auto& slot = y[grid.nearest_class(d)];
    if (slot != 0.0f) throw DatasetError("dataset: two sources share one grid class");
    slot = 1.0f;
  }
  return y;
}

std::vector<Split> assign_splits(const DatasetSpec& spec) {
  std::vector<Split> splits(spec.example_count(), Split::Test);
  std::size_t begin = 0;
  for (std::size_t k = 0; k < kMaxSources; ++k) {
    const std::size_t n = spec.counts[k];
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), begin);
    auto rng = example_rng(spec.seed, k, 2);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.train_ratio));
    const auto n_val = std::min(n - std::min(n, n_train),
                                static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.validation_ratio)));
    for (std::size_t i = 0; i < n; ++i) {
      splits[order[i]] = i < n_train ? Split::Train : (i < n_train + n_val ? Split::Validation : Split::Test);
    }
    begin += n;
  }
  return splits;
}

namespace {

std::vector<LabeledSequence> label_example(ExampleAudio&& audio, const SphericalGrid& grid, Split split) {
  std::vector<LabeledSequence> out;
  auto features = extract_features(audio.mixture);
  const auto target = make_target(grid, audio.truth);
  for (std::size_t s = 0; s < features.size(); ++s) {
    LabeledSequence seq;
    seq.id = record_id(audio.provenance.example, s);
    seq.features = std::move(features[s]);
    seq.target = target;
    seq.truth = audio.truth;
    seq.provenance = audio.provenance;
    seq.split = split;
    out.push_back(std::move(seq));
  }
  return out;
}

// Renders examples [first, last) on `jobs` threads, returned in order.
std::vector<LabeledSequence> render_range(const DatasetSpec& spec, const SpeechCorpus& corpus,
                                          const SphericalGrid& grid, const std::vector<Split>& splits,
                                          std::size_t first, std::size_t last, int jobs) {
  std::vector<std::vector<LabeledSequence>> per(last - first);
  parallel_for(last - first, jobs, [&](std::size_t i) {
    per[i] = label_example(render_example(spec, corpus, first + i), grid, splits[first + i]);
  });
  std::vector<LabeledSequence> out;
  for (auto& v : per) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

std::string manifest_header(const DatasetSpec& spec, std::size_t classes) {
  std::ostringstream os;
  os << "# ambiloc-dataset format=" << kDatasetFormatVersion << " classes=" << classes
     << " alpha=" << format_double(spec.grid_alpha) << " seed=" << spec.seed << "\n";
  os << "# id\tfile\toffset\tn_sources\tsnr_db\ttruth\tchecksum\tsplit\troom_id\troom_dims\trt60\tsources\n";
  return os.str();
}

class ManifestWriter {
 public:
  ManifestWriter(const std::filesystem::path& dir, const DatasetSpec& spec, std::size_t classes)
      : features_(dir / kFeatureFileName), manifest_(dir / kManifestFileName) {
    if (!manifest_) throw DatasetError("cannot create manifest in " + dir.string());
    manifest_ << manifest_header(spec, classes);
  }

  void append(const LabeledSequence& seq) {
    tensor_io::Tensor x{seq.id + "/features",
                        {static_cast<std::uint32_t>(seq.features.frames), static_cast<std::uint32_t>(seq.features.bins),
                         static_cast<std::uint32_t>(kFeatureChannels)},
                        seq.features.values};
    tensor_io::Tensor y{seq.id + "/target", {static_cast<std::uint32_t>(seq.target.size())}, seq.target};
    const std::uint64_t offset = features_.append(x);
    features_.append(y);
    const tensor_io::Tensor* both[] = {&x, &y};
    const std::uint32_t crc = tensor_io::payload_crc(both);

    const auto& p = seq.provenance;
    manifest_ << seq.id << '\t' << kFeatureFileName << '\t' << offset << '\t' << seq.truth.size() << '\t'
              << format_double(p.snr_db) << '\t';
    for (std::size_t i = 0; i < seq.truth.size(); ++i) {
      manifest_ << (i ? ";" : "") << format_double(seq.truth[i].azimuth_deg()) << ','
                << format_double(seq.truth[i].elevation_deg());
    }
    char hex[16];
    std::snprintf(hex, sizeof hex, "%08x", crc);
    manifest_ << '\t' << hex << '\t' << split_name(seq.split) << '\t' << p.room_id << '\t'
              << format_double(p.room_dims[0]) << ',' << format_double(p.room_dims[1]) << ','
              << format_double(p.room_dims[2]) << '\t' << format_double(p.rt60) << '\t';
    for (std::size_t i = 0; i < p.source_ids.size(); ++i) {
      manifest_ << (i ? ";" : "") << p.source_ids[i] << '@' << p.source_offsets[i];
    }
    manifest_ << '\n';
  }

  void close() {
    features_.close();
    manifest_.close();
    if (!manifest_) throw DatasetError("manifest write failed");
  }

 private:
  tensor_io::ContainerWriter features_;
  std::ofstream manifest_;
};

}  // namespace

std::vector<LabeledSequence> synthesize_sequences(const DatasetSpec& spec, int jobs) {
  spec.validate();
  const SpeechCorpus corpus = corpus_for(spec);
  const SphericalGrid grid(spec.grid_alpha);
  return render_range(spec, corpus, grid, assign_splits(spec), 0, spec.example_count(), jobs);
}

void write_dataset(const std::filesystem::path& dir, const std::vector<LabeledSequence>& sequences,
                   const DatasetSpec& spec) {
  std::filesystem::create_directories(dir);
  ManifestWriter w(dir, spec, grid_class_count(spec.grid_alpha));
  for (const auto& s : sequences) w.append(s);
  w.close();
}

DatasetSummary generate_dataset(const DatasetSpec& spec, const std::filesystem::path& dir, int jobs) {
  spec.validate();
  const SpeechCorpus corpus = corpus_for(spec);
  const SphericalGrid grid(spec.grid_alpha);
  const auto splits = assign_splits(spec);
  std::filesystem::create_directories(dir);
  ManifestWriter w(dir, spec, grid.class_count());

  DatasetSummary summary;
  summary.examples = spec.example_count();
  for (std::size_t first = 0; first < summary.examples; first += kChunkExamples) {
    const std::size_t last = std::min(summary.examples, first + kChunkExamples);
    for (const auto& seq : render_range(spec, corpus, grid, splits, first, last, jobs)) {
      w.append(seq);
      ++summary.sequences;
      ++summary.per_split[static_cast<std::size_t>(seq.split)];
    }
  }
  w.close();
  return summary;
}

Dataset Dataset::open(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestFileName);
  if (!in) throw DatasetError("dataset: no manifest in " + dir.string());
  Dataset ds;
  ds.dir_ = dir;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ambiloc-dataset", 0) != 0) {
    throw DatasetError("dataset: manifest header missing in " + dir.string());
  }
  {
    std::istringstream hs(line.substr(18));
    std::string kv;
    int version = -1;
    while (hs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (key == "format") version = static_cast<int>(parse_uint(value, "manifest header"));
      if (key == "classes") ds.class_count_ = parse_uint(value, "manifest header");
      if (key == "alpha") ds.grid_alpha_ = parse_double(value, "manifest header");
    }
    if (version != kDatasetFormatVersion) {
      throw DatasetError("dataset: manifest format version " + std::to_string(version) + " is not supported (expected " +
                         std::to_string(kDatasetFormatVersion) + ")");
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    const auto f = split_on(line, '\t');
    if (f.size() != 12) throw DatasetError(where + ": expected 12 columns");
    ManifestRecord r;
    r.id = f[0];
    r.file = f[1];
    r.offset = parse_uint(f[2], where);
    r.n_sources = parse_uint(f[3], where);
    r.snr_db = parse_double(f[4], where);
    for (const auto& pair : split_on(f[5], ';')) {
      const auto ae = split_on(pair, ',');
      if (ae.size() != 2) throw DatasetError(where + ": bad truth direction");
      r.truth.emplace_back(parse_double(ae[0], where), parse_double(ae[1], where));
    }
    if (r.truth.size() != r.n_sources) throw DatasetError(where + ": source count does not match truth list");
    r.checksum = static_cast<std::uint32_t>(std::stoul(f[6], nullptr, 16));
    r.split = parse_split(f[7]);
    r.provenance.room_id = parse_uint(f[8], where);
    const auto dims = split_on(f[9], ',');
    if (dims.size() != 3) throw DatasetError(where + ": bad room dimensions");
    for (int a = 0; a < 3; ++a) r.provenance.room_dims[a] = parse_double(dims[a], where);
    r.provenance.rt60 = parse_double(f[10], where);
    r.provenance.snr_db = r.snr_db;
    r.provenance.example = r.provenance.room_id;
    for (const auto& src : split_on(f[11], ';')) {
      const auto at = src.rfind('@');
      if (at == std::string::npos) throw DatasetError(where + ": bad source id");
      r.provenance.source_ids.push_back(src.substr(0, at));
      r.provenance.source_offsets.push_back(parse_uint(src.substr(at + 1), where));
    }
    ds.records_.push_back(std::move(r));
  }
  return ds;
}

LabeledSequence Dataset::load(std::size_t i) const { return load(std::vector<std::size_t>{i}).front(); }

std::vector<LabeledSequence> Dataset::load(const std::vector<std::size_t>& indices) const {
  std::vector<LabeledSequence> out;
  out.reserve(indices.size());
  std::string open_file;
  std::optional<tensor_io::ContainerReader> reader;
  for (const std::size_t i : indices) {
    if (i >= records_.size()) throw DatasetError("dataset: record index " + std::to_string(i) + " out of range");
    const auto& r = records_[i];
    const std::string where = "dataset record " + std::to_string(i) + " (" + r.id + ")";
    try {
      if (!reader || open_file != r.file) {
        reader.emplace(dir_ / r.file);
        open_file = r.file;
      }
      auto x = reader->read_at(r.offset);
      auto y = reader->read_at(r.offset + 2 + x.name.size() + 1 + 4 * x.dims.size() + 4 * x.values.size());
      if (x.name != r.id + "/features" || y.name != r.id + "/target") throw DatasetError(where + ": tensor name mismatch");
      if (x.dims.size() != 3 || x.dims[2] != kFeatureChannels || y.dims.size() != 1 || y.dims[0] != class_count_) {
        throw DatasetError(where + ": unexpected tensor shape");
      }
      const tensor_io::Tensor* both[] = {&x, &y};
      if (tensor_io::payload_crc(both) != r.checksum) throw DatasetError(where + ": checksum mismatch");

      LabeledSequence s;
      s.id = r.id;
      s.features = FeatureTensor(x.dims[0], x.dims[1]);
      s.features.values = std::move(x.values);
      s.target = std::move(y.values);
      s.truth = r.truth;
      s.provenance = r.provenance;
      s.split = r.split;
      out.push_back(std::move(s));
    } catch (const tensor_io::FormatError& e) {
      throw DatasetError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::size_t> Dataset::indices(std::optional<Split> split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!split || records_[i].split == *split) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::shuffled(std::uint64_t seed, std::optional<Split> split) const {
  auto out = indices(split);
  std::mt19937_64 rng(seed);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace ambiloc
