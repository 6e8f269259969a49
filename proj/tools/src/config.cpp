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

#include "ambiloc_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ambiloc/arch.hpp"

namespace ambiloc::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment", {"seed", "out", "jobs"}},
      {"grid", {"alpha"}},
      {"model", {"arch"}},
      {"dataset",
       {"counts", "dims_min", "dims_max", "rt60_min", "rt60_max", "wall_margin", "distance_min", "distance_max",
        "snr_min_db", "snr_max_db", "add_noise", "min_separation_deg", "corpus", "synthetic_corpus_size",
        "synthetic_corpus_seconds", "train_ratio", "validation_ratio", "test_ratio", "excerpt_s", "babble_directions",
        "srir_max_seconds", "max_room_retries"}},
      {"train",
       {"stop_patience", "lr_patience", "max_epochs", "learning_rate", "lr_factor", "batch_size", "tolerance_deg",
        "max_seconds"}},
      {"decode", {"mode", "sources", "beta", "radius_factor"}},
      {"metrics", {"tolerances", "accuracy_mode"}},
      {"room", {"dimensions", "rt60", "source", "mic", "speed_of_sound", "max_order", "duration_s", "wall_model", "high_pass"}},
  };
  return keys;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str()) throw ConfigError("config: '" + key + "' expects comma-separated numbers, got '" + s + "'");
    while (*end == ' ') ++end;
    if (*end != '\0') throw ConfigError("config: '" + key + "' expects comma-separated numbers, got '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::filesystem::path base) : tree_(tree), base_(std::move(base)) {}

  template <typename T>
  void get(const std::string& key, T& dst) const {
    const auto node = tree_.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return;
    const auto v = node->get_value_optional<T>();
    if (!v) throw ConfigError("config: bad value for '" + key + "': '" + node->data() + "'");
    dst = *v;
  }

  void vec3(const std::string& key, Vec3& dst) const {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    const auto v = parse_list(s, key);
    if (v.size() != 3) throw ConfigError("config: '" + key + "' expects three numbers");
    dst = {v[0], v[1], v[2]};
  }

  void list(const std::string& key, std::vector<double>& dst) const {
    std::string s;
    get(key, s);
    if (!s.empty()) dst = parse_list(s, key);
  }

  void path(const std::string& key, std::filesystem::path& dst) const {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    dst = p.is_relative() && !base_.empty() ? base_ / p : p;
  }

 private:
  const pt::ptree& tree_;
  std::filesystem::path base_;
};

}  // namespace

void ExperimentConfig::validate() const {
  if (jobs < 1) throw ConfigError("config: experiment.jobs must be at least 1");
  try {
    (void)config_by_name(arch, static_cast<int>(grid_class_count(grid_alpha)));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: model.arch: ") + e.what());
  }
  if (!(grid_alpha > 0.0 && grid_alpha <= 180.0)) throw ConfigError("config: grid.alpha must lie in (0, 180]");
  if (dataset.grid_alpha != grid_alpha) throw ConfigError("config: dataset grid differs from grid.alpha");
  if (!dataset.corpus.empty() && !std::filesystem::is_directory(dataset.corpus)) {
    throw ConfigError("config: dataset.corpus is not a directory: " + dataset.corpus.string());
  }
  if (tolerances.empty()) throw ConfigError("config: metrics.tolerances is empty");
  for (const double t : tolerances) {
    if (!(t > 0.0)) throw ConfigError("config: metrics.tolerances must be positive");
  }
  if (!(peak_radius_factor > 0.0)) throw ConfigError("config: decode.radius_factor must be positive");
  if (const auto* th = std::get_if<Threshold>(&decode); th && !(th->beta > 0.0 && th->beta < 1.0)) {
    throw ConfigError("config: decode.beta must lie in (0, 1)");
  }
  if (const auto* k = std::get_if<KnownCount>(&decode); k && k->sources == 0) {
    throw ConfigError("config: decode.sources must be at least 1");
  }
  try {
    dataset.validate();
    schedule.validate();
    room.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
  }

  ExperimentConfig c;
  const Reader r(tree, base_dir);
  r.get("experiment.seed", c.seed);
  r.path("experiment.out", c.out);
  r.get("experiment.jobs", c.jobs);
  r.get("grid.alpha", c.grid_alpha);
  r.get("model.arch", c.arch);

  auto& d = c.dataset;
  std::vector<double> counts;
  r.list("dataset.counts", counts);
  if (!counts.empty()) {
    if (counts.size() != 3) throw ConfigError("config: dataset.counts expects three numbers (1, 2, 3 sources)");
    for (std::size_t k = 0; k < 3; ++k) {
      if (counts[k] < 0 || counts[k] != static_cast<double>(static_cast<std::size_t>(counts[k]))) {
        throw ConfigError("config: dataset.counts must be non-negative integers");
      }
      d.counts[k] = static_cast<std::size_t>(counts[k]);
    }
  }
  r.vec3("dataset.dims_min", d.room.dims_min);
  r.vec3("dataset.dims_max", d.room.dims_max);
  r.get("dataset.rt60_min", d.room.rt60_min);
  r.get("dataset.rt60_max", d.room.rt60_max);
  r.get("dataset.wall_margin", d.room.wall_margin);
  r.get("dataset.distance_min", d.room.distance_min);
  r.get("dataset.distance_max", d.room.distance_max);
  r.get("dataset.snr_min_db", d.snr_min_db);
  r.get("dataset.snr_max_db", d.snr_max_db);
  r.get("dataset.add_noise", d.add_noise);
  r.get("dataset.min_separation_deg", d.min_separation_deg);
  r.path("dataset.corpus", d.corpus);
  r.get("dataset.synthetic_corpus_size", d.synthetic_corpus_size);
  r.get("dataset.synthetic_corpus_seconds", d.synthetic_corpus_seconds);
  r.get("dataset.train_ratio", d.train_ratio);
  r.get("dataset.validation_ratio", d.validation_ratio);
  r.get("dataset.test_ratio", d.test_ratio);
  r.get("dataset.excerpt_s", d.excerpt_s);
  r.get("dataset.babble_directions", d.babble_directions);
  r.get("dataset.srir_max_seconds", d.srir_max_seconds);
  r.get("dataset.max_room_retries", d.max_room_retries);
  d.seed = c.seed;
  d.grid_alpha = c.grid_alpha;

  auto& s = c.schedule;
  r.get("train.stop_patience", s.stop_patience);
  r.get("train.lr_patience", s.lr_patience);
  r.get("train.max_epochs", s.max_epochs);
  r.get("train.learning_rate", s.learning_rate);
  r.get("train.lr_factor", s.lr_factor);
  r.get("train.batch_size", s.batch_size);
  r.get("train.tolerance_deg", s.tolerance_deg);
  r.get("train.max_seconds", s.max_seconds);

  std::string mode = "known";
  r.get("decode.mode", mode);
  if (mode == "known") {
    KnownCount k;
    r.get("decode.sources", k.sources);
    c.decode = k;
  } else if (mode == "threshold") {
    Threshold t;
    r.get("decode.beta", t.beta);
    c.decode = t;
  } else {
    throw ConfigError("config: decode.mode must be 'known' or 'threshold', got '" + mode + "'");
  }
  r.get("decode.radius_factor", c.peak_radius_factor);

  r.list("metrics.tolerances", c.tolerances);
  std::string acc = "pooled";
  r.get("metrics.accuracy_mode", acc);
  if (acc == "pooled") {
    c.accuracy_mode = AccuracyMode::PooledSources;
  } else if (acc == "all_sources") {
    c.accuracy_mode = AccuracyMode::AllSourcesPerSequence;
  } else {
    throw ConfigError("config: metrics.accuracy_mode must be 'pooled' or 'all_sources', got '" + acc + "'");
  }

  r.vec3("room.dimensions", c.room.dimensions);
  r.get("room.rt60", c.room.rt60);
  r.vec3("room.source", c.room.source);
  r.vec3("room.mic", c.room.mic);
  r.get("room.speed_of_sound", c.room.speed_of_sound);
  r.get("room.max_order", c.srir.max_order);
  r.get("room.duration_s", c.srir.duration_s);
  std::string wall = "decay_matched";
  r.get("room.wall_model", wall);
  if (wall == "decay_matched") {
    c.srir.wall_model = WallModel::DecayMatched;
  } else if (wall == "sabine") {
    c.srir.wall_model = WallModel::Sabine;
  } else {
    throw ConfigError("config: room.wall_model must be 'decay_matched' or 'sabine', got '" + wall + "'");
  }
  r.get("room.high_pass", c.srir.high_pass);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string to_ini(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto v3 = [](const Vec3& v) { return fmt(v[0]) + "," + fmt(v[1]) + "," + fmt(v[2]); };
  const auto& d = c.dataset;
  const auto& s = c.schedule;
  os << "[experiment]\nseed = " << c.seed << "\nout = " << c.out.string() << "\njobs = " << c.jobs << "\n\n";
  os << "[grid]\nalpha = " << fmt(c.grid_alpha) << "\n\n";
  os << "[model]\narch = " << c.arch << "\n\n";
  os << "[dataset]\ncounts = " << d.counts[0] << "," << d.counts[1] << "," << d.counts[2] << "\n"
     << "dims_min = " << v3(d.room.dims_min) << "\ndims_max = " << v3(d.room.dims_max) << "\n"
     << "rt60_min = " << fmt(d.room.rt60_min) << "\nrt60_max = " << fmt(d.room.rt60_max) << "\n"
     << "wall_margin = " << fmt(d.room.wall_margin) << "\n"
     << "distance_min = " << fmt(d.room.distance_min) << "\ndistance_max = " << fmt(d.room.distance_max) << "\n"
     << "snr_min_db = " << fmt(d.snr_min_db) << "\nsnr_max_db = " << fmt(d.snr_max_db) << "\n"
     << "add_noise = " << (d.add_noise ? "true" : "false") << "\n"
     << "min_separation_deg = " << fmt(d.min_separation_deg) << "\n";
  if (!d.corpus.empty()) os << "corpus = " << d.corpus.string() << "\n";
  os << "synthetic_corpus_size = " << d.synthetic_corpus_size << "\n"
     << "synthetic_corpus_seconds = " << fmt(d.synthetic_corpus_seconds) << "\n"
     << "train_ratio = " << fmt(d.train_ratio) << "\nvalidation_ratio = " << fmt(d.validation_ratio)
     << "\ntest_ratio = " << fmt(d.test_ratio) << "\n"
     << "excerpt_s = " << fmt(d.excerpt_s) << "\nbabble_directions = " << d.babble_directions << "\n"
     << "srir_max_seconds = " << fmt(d.srir_max_seconds) << "\nmax_room_retries = " << d.max_room_retries << "\n\n";
  os << "[train]\nstop_patience = " << s.stop_patience << "\nlr_patience = " << s.lr_patience
     << "\nmax_epochs = " << s.max_epochs << "\nlearning_rate = " << fmt(s.learning_rate)
     << "\nlr_factor = " << fmt(s.lr_factor) << "\nbatch_size = " << s.batch_size
     << "\ntolerance_deg = " << fmt(s.tolerance_deg) << "\nmax_seconds = " << fmt(s.max_seconds) << "\n\n";
  os << "[decode]\n";
  if (const auto* k = std::get_if<KnownCount>(&c.decode)) {
    os << "mode = known\nsources = " << k->sources << "\n";
  } else {
    os << "mode = threshold\nbeta = " << fmt(std::get<Threshold>(c.decode).beta) << "\n";
  }
  os << "radius_factor = " << fmt(c.peak_radius_factor) << "\n\n";
  os << "[metrics]\ntolerances = " << join(c.tolerances) << "\naccuracy_mode = "
     << (c.accuracy_mode == AccuracyMode::PooledSources ? "pooled" : "all_sources") << "\n\n";
  os << "[room]\ndimensions = " << v3(c.room.dimensions) << "\nrt60 = " << fmt(c.room.rt60)
     << "\nsource = " << v3(c.room.source) << "\nmic = " << v3(c.room.mic)
     << "\nspeed_of_sound = " << fmt(c.room.speed_of_sound) << "\nmax_order = " << c.srir.max_order
     << "\nduration_s = " << fmt(c.srir.duration_s)
     << "\nwall_model = " << (c.srir.wall_model == WallModel::Sabine ? "sabine" : "decay_matched")
     << "\nhigh_pass = " << (c.srir.high_pass ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace ambiloc::cli
