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

#include "ambiloc_cli/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>

#include "ambiloc/arch.hpp"
#include "ambiloc/dataset.hpp"
#include "ambiloc/decode.hpp"
#include "ambiloc/dsp.hpp"
#include "ambiloc/features.hpp"
#include "ambiloc/foa.hpp"
#include "ambiloc/metrics.hpp"
#include "ambiloc/parallel.hpp"
#include "ambiloc/room_sim.hpp"
#include "ambiloc/tensor_io.hpp"
#include "ambiloc/train.hpp"
#include "ambiloc/wav.hpp"
#include "ambiloc_cli/config.hpp"

namespace ambiloc::cli {

namespace {

namespace fs = std::filesystem;

struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string profile;
  std::string input;
  std::string dataset;
  std::string checkpoint;
  std::string method = "histogram";
  std::string arch;
  std::optional<std::size_t> sources;
};

struct Context {
  ExperimentConfig cfg;
  Flags flags;
  std::ostream* out;
  std::shared_ptr<spdlog::logger> log;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw MissingInput(what + " not found: " + p.string());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
  if (!os) throw std::runtime_error("cannot write " + p.string());
}

fs::path dataset_dir(const Context& c) {
  return c.flags.dataset.empty() ? c.cfg.out / "dataset" : fs::path(c.flags.dataset);
}

fs::path checkpoint_dir(const Context& c) {
  return c.flags.checkpoint.empty() ? c.cfg.out / "checkpoint" : fs::path(c.flags.checkpoint);
}

std::string doa_line(const std::string& id, std::size_t rank, const DoaEstimate& e) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%zu,%.4f,%.4f,%.6f\n", id.c_str(), rank, e.direction.azimuth_deg(),
                e.direction.elevation_deg(), e.score);
  return buf;
}

constexpr const char* kDoaHeader = "sequence,rank,azimuth_deg,elevation_deg,score\n";

int cmd_simulate_srir(Context& c) {
  const Srir srir = simulate_srir(c.cfg.room, c.cfg.srir);
  fs::create_directories(c.cfg.out);
  wav::write_foa(c.cfg.out / "srir.wav", srir.response);
  std::string meta = srir_metadata(c.cfg.room, srir);
  if (const auto rt = measure_rt60(srir.response.channel(0), srir.response.sample_rate())) {
    meta += "measured_rt60=" + fmt("%.6f", *rt) + "\n";
  }
  write_text(c.cfg.out / "srir.txt", meta);
  *c.out << meta;
  c.log->info("wrote {} samples and {} images to {}", srir.response.length(), srir.image_count,
              (c.cfg.out / "srir.wav").string());
  return kOk;
}

int cmd_synth_dataset(Context& c) {
  const fs::path dir = dataset_dir(c);
  c.log->info("synthesizing {} examples into {}", c.cfg.dataset.example_count(), dir.string());
  const auto summary = generate_dataset(c.cfg.dataset, dir, c.cfg.jobs);
  fs::create_directories(c.cfg.out);
  write_text(c.cfg.out / "config.ini", to_ini(c.cfg));
  *c.out << "examples," << summary.examples << "\nsequences," << summary.sequences << "\ntrain," << summary.per_split[0]
         << "\nvalidation," << summary.per_split[1] << "\ntest," << summary.per_split[2] << "\n";
  return kOk;
}

int cmd_extract_features(Context& c) {
  require_file(c.flags.input, "input WAVE");
  const FoaSignal s = wav::read_foa(c.flags.input);
  const auto features = extract_features(s);
  std::vector<tensor_io::Tensor> tensors;
  for (std::size_t i = 0; i < features.size(); ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "seq%03zu/features", i);
    tensors.push_back({name,
                       {static_cast<std::uint32_t>(features[i].frames), static_cast<std::uint32_t>(features[i].bins),
                        static_cast<std::uint32_t>(kFeatureChannels)},
                       features[i].values});
  }
  fs::create_directories(c.cfg.out);
  tensor_io::write_container(c.cfg.out / "features.ambt", tensors);
  *c.out << "sequences," << features.size() << "\n";
  return kOk;
}

Dataset open_dataset(const Context& c) {
  const fs::path dir = dataset_dir(c);
  require_file(dir / kManifestFileName, "dataset manifest");
  Dataset ds = Dataset::open(dir);
  if (ds.grid_alpha() != c.cfg.grid_alpha) {
    throw ConfigError("config: grid.alpha " + fmt("%g", c.cfg.grid_alpha) + " differs from the dataset's " +
                      fmt("%g", ds.grid_alpha()));
  }
  return ds;
}

int cmd_train(Context& c) {
  const Dataset ds = open_dataset(c);
  const SphericalGrid grid(c.cfg.grid_alpha);
  const ArchConfig arch = config_by_name(c.cfg.arch, static_cast<int>(grid.class_count()));
  const auto train_set = ds.load(ds.indices(Split::Train));
  const auto val_set = ds.load(ds.indices(Split::Validation));
  c.log->info("training {} ({} parameters) on {} sequences, validating on {}", arch.name, count_parameters(arch),
              train_set.size(), val_set.size());
  const auto result = train(arch, train_set, val_set, grid, c.cfg.schedule, c.cfg.seed, c.cfg.jobs,
                            [&](const EpochRecord& r) {
                              c.log->info("epoch {} loss {:.6f} val_acc {:.2f} lr {:.3g}", r.epoch, r.train_loss,
                                          r.validation_accuracy, r.learning_rate);
                            });
  fs::create_directories(c.cfg.out);
  save_checkpoint(checkpoint_dir(c), result.best,
                  {arch.name, result.best_epoch, result.best_validation_accuracy, c.cfg.grid_alpha});
  write_text(c.cfg.out / "history.csv", history_csv(result.history));
  *c.out << "best_epoch," << result.best_epoch << "\nbest_validation_accuracy,"
         << fmt("%.4f", result.best_validation_accuracy) << "\nepochs," << result.history.size() << "\n";
  if (result.hit_time_cap) c.log->warn("stopped at the wall-clock cap of {} s", c.cfg.schedule.max_seconds);
  return kOk;
}

std::vector<DoaEstimate> network_estimates(const NetworkParams<float>& params, const FeatureTensor& x,
                                           const PeakPicker& picker, const PeakMode& mode) {
  return to_estimates(picker.pick(average_frames(forward(params, x)), mode), picker.grid());
}

int cmd_evaluate(Context& c) {
  const fs::path cp_dir = checkpoint_dir(c);
  require_file(cp_dir / kCheckpointManifest, "checkpoint");
  const Checkpoint cp = load_checkpoint(cp_dir);
  const Dataset ds = open_dataset(c);
  const SphericalGrid grid(c.cfg.grid_alpha);
  if (static_cast<std::size_t>(cp.params.arch().class_count) != grid.class_count()) {
    throw ConfigError("config: checkpoint class count differs from grid.alpha");
  }
  const PeakPicker picker(grid, c.cfg.peak_radius_factor);
  const auto test = ds.load(ds.indices(Split::Test));
  if (test.empty()) throw MissingInput("dataset has no test sequences");

  std::vector<std::vector<DoaEstimate>> estimates(test.size());
  parallel_for(test.size(), c.cfg.jobs, [&](std::size_t i) {
    const PeakMode mode = std::holds_alternative<KnownCount>(c.cfg.decode) ? PeakMode{KnownCount{test[i].truth.size()}}
                                                                            : c.cfg.decode;
    estimates[i] = network_estimates(cp.params, test[i].features, picker, mode);
  });

  std::string doa = kDoaHeader;
  std::map<std::size_t, std::vector<EvalRecord>> by_count;
  std::vector<EvalRecord> all;
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::vector<Direction> est;
    for (std::size_t r = 0; r < estimates[i].size(); ++r) {
      doa += doa_line(test[i].id, r + 1, estimates[i][r]);
      est.push_back(estimates[i][r].direction);
    }
    auto rec = EvalRecord::make(test[i].id, test[i].truth, std::move(est));
    by_count[test[i].truth.size()].push_back(rec);
    all.push_back(std::move(rec));
  }

  std::string report = "model,n_sources";
  for (const double t : c.cfg.tolerances) report += ",acc<" + fmt("%g", t);
  report += ",mean,median\n";
  std::string detection = "model,n_sources,truths,estimates,matched,recall,precision\n";
  const auto row = [&](const std::string& label, const std::vector<EvalRecord>& recs) {
    const Summary s = summarize(recs, c.cfg.tolerances, c.cfg.accuracy_mode);
    report += cp.meta.config + "," + label;
    for (const double a : s.accuracy_percent) report += "," + fmt("%.2f", a);
    report += "," + fmt("%.3f", s.mean_error) + "," + fmt("%.3f", s.median_error) + "\n";
    detection += cp.meta.config + "," + label + "," + std::to_string(s.truth_total) + "," +
                 std::to_string(s.estimate_total) + "," + std::to_string(s.matched) + "," + fmt("%.4f", s.recall) + "," +
                 fmt("%.4f", s.precision) + "\n";
  };
  for (const auto& [n, recs] : by_count) row(std::to_string(n), recs);
  row("all", all);

  fs::create_directories(c.cfg.out);
  write_text(c.cfg.out / "estimates.csv", doa);
  write_text(c.cfg.out / "report.csv", report);
  write_text(c.cfg.out / "detection.csv", detection);
  *c.out << report;
  return kOk;
}

int cmd_localize(Context& c) {
  require_file(c.flags.input, "input WAVE");
  const FoaSignal s = wav::read_foa(c.flags.input);
  const SphericalGrid grid(c.cfg.grid_alpha);
  const PeakPicker picker(grid, c.cfg.peak_radius_factor);
  PeakMode mode = c.cfg.decode;
  if (c.flags.sources) mode = KnownCount{*c.flags.sources};

  const FoaSpectrogram spec = stft(s);
  std::vector<FoaSpectrogram> slices;
  if (spec.frames() >= kSequenceFrames) {
    slices = frame_sequences(spec);
  } else {
    slices.push_back(spec);
  }

  std::optional<Checkpoint> cp;
  if (c.flags.method == "network") {
    const fs::path cp_dir = checkpoint_dir(c);
    require_file(cp_dir / kCheckpointManifest, "checkpoint");
    cp = load_checkpoint(cp_dir);
    if (static_cast<std::size_t>(cp->params.arch().class_count) != grid.class_count()) {
      throw ConfigError("config: checkpoint class count differs from grid.alpha");
    }
    if (spec.frames() < kSequenceFrames) throw MissingInput("input shorter than one 25-frame sequence");
  }

  std::string doa = kDoaHeader;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "seq%03zu", i);
    std::vector<DoaEstimate> est;
    if (cp) {
      const FeatureTensor x = normalize_power(intensity_vectors(slices[i]), slices[i]);
      est = network_estimates(cp->params, x, picker, mode);
    } else {
      est = histogram_localizer(slices[i], picker, mode);
    }
    for (std::size_t r = 0; r < est.size(); ++r) doa += doa_line(id, r + 1, est[r]);
  }
  fs::create_directories(c.cfg.out);
  write_text(c.cfg.out / "doa.csv", doa);
  *c.out << doa;
  return kOk;
}

int cmd_count_params(Context& c) {
  const int classes = static_cast<int>(grid_class_count(c.cfg.grid_alpha));
  std::vector<std::string> names;
  if (c.flags.arch.empty() || c.flags.arch == "all") {
    for (const auto& p : published_configs()) names.emplace_back(p.name);
  } else {
    names.push_back(c.flags.arch);
  }
  *c.out << "config,classes,parameters,published,deviation_percent\n";
  for (const auto& name : names) {
    const ArchConfig arch = config_by_name(name, classes);
    const std::size_t n = count_parameters(arch);
    *c.out << name << "," << classes << "," << n;
    const auto& pub = published_configs();
    const auto it = std::find_if(pub.begin(), pub.end(), [&](const PublishedConfig& p) { return p.name == name; });
    if (it != pub.end()) {
      *c.out << "," << it->parameters << ","
             << fmt("%+.3f", 100.0 * (static_cast<double>(n) - static_cast<double>(it->parameters)) /
                                 static_cast<double>(it->parameters));
    } else {
      *c.out << ",,";
    }
    *c.out << "\n";
  }
  return kOk;
}

int cmd_selftest(Context& c) {
  std::vector<std::pair<std::string, std::function<bool()>>> checks{
      {"foa gain norm is 3",
       [] {
         const auto g = encode_direction(Direction(37.0, -21.0));
         return std::abs(g.x * g.x + g.y * g.y + g.z * g.z - 3.0) < 1e-12;
       }},
      {"grid alpha 10 has 425 classes", [] { return SphericalGrid(10.0).class_count() == 425; }},
      {"grid points classify to themselves",
       [] {
         const SphericalGrid g(10.0);
         for (std::size_t i = 0; i < g.class_count(); ++i) {
           if (g.nearest_class(g.point(i)) != i) return false;
         }
         return true;
       }},
      {"sine window is power complementary",
       [] {
         const auto w = StftConfig{}.window();
         for (std::size_t n = 0; n < 512; ++n) {
           if (std::abs(w[n] * w[n] + w[n + 512] * w[n + 512] - 1.0) > 1e-12) return false;
         }
         return StftConfig{}.bins() == 513;
       }},
      {"parameter deltas 65536 and 131072",
       [] {
         const auto n = [](const char* name) { return static_cast<long>(count_parameters(named_config(name, 425))); };
         return n("4-4") - n("4-2") == 65536 && n("4-8") - n("4-4") == 131072;
       }},
      {"peak picking finds a lone spike",
       [] {
         const SphericalGrid g(30.0);
         std::vector<double> p(g.class_count(), 0.0);
         p[17] = 1.0;
         const auto r = PeakPicker(g).pick(p, KnownCount{1});
         return r.peaks.size() == 1 && r.peaks[0].class_index == 17;
       }},
      {"summary of errors 5, 12, 30",
       [] {
         std::vector<EvalRecord> recs{{"a", {}, {}, {5.0}}, {"b", {}, {}, {12.0}}, {"c", {}, {}, {30.0}}};
         const auto s = summarize(recs, {10.0, 15.0});
         return std::abs(s.accuracy_percent[0] - 100.0 / 3.0) < 1e-9 &&
                std::abs(s.accuracy_percent[1] - 200.0 / 3.0) < 1e-9 && s.median_error == 12.0;
       }},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      c.log->error("{}: {}", name, e.what());
    }
    *c.out << (ok ? "ok   " : "FAIL ") << name << "\n";
    failed += ok ? 0 : 1;
  }
  *c.out << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " checks passed\n";
  return failed ? kSelftestFailed : kOk;
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& log) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(log, true);
  auto logger = std::make_shared<spdlog::logger>("ambiloc", sink);
  logger->set_pattern("[%l] %v");
  logger->set_level(spdlog::level::info);
  return logger;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  auto logger = make_logger(log);
  Flags flags;
  CLI::App app{"ambiloc: first-order ambisonics source localization"};
  app.name("ambiloc");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", flags.config, "INI experiment configuration");
  app.add_option("--out", flags.out, "output directory (overrides experiment.out)");
  app.add_option("--seed", flags.seed, "random seed (overrides experiment.seed)");
  app.add_option("--jobs", flags.jobs, "worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--profile", flags.profile, "model profile")->check(CLI::IsMember({"full", "reduced"}));

  using Handler = int (*)(Context&);
  std::vector<std::pair<CLI::App*, Handler>> subs;
  auto* sim = app.add_subcommand("simulate-srir", "simulate the [room] SRIR into srir.wav and srir.txt");
  subs.emplace_back(sim, cmd_simulate_srir);
  auto* synth = app.add_subcommand("synth-dataset", "render, label and persist the [dataset] corpus");
  synth->add_option("--dataset", flags.dataset, "dataset directory (default OUT/dataset)");
  subs.emplace_back(synth, cmd_synth_dataset);
  auto* feat = app.add_subcommand("extract-features", "intensity features of a 4-channel WAVE");
  feat->add_option("--input", flags.input, "4-channel W,X,Y,Z WAVE")->required();
  subs.emplace_back(feat, cmd_extract_features);
  auto* tr = app.add_subcommand("train", "train the configured model on a persisted dataset");
  tr->add_option("--dataset", flags.dataset, "dataset directory (default OUT/dataset)");
  tr->add_option("--checkpoint", flags.checkpoint, "checkpoint directory (default OUT/checkpoint)");
  subs.emplace_back(tr, cmd_train);
  auto* ev = app.add_subcommand("evaluate", "decode the test split and write report.csv");
  ev->add_option("--dataset", flags.dataset, "dataset directory (default OUT/dataset)");
  ev->add_option("--checkpoint", flags.checkpoint, "checkpoint directory (default OUT/checkpoint)");
  subs.emplace_back(ev, cmd_evaluate);
  auto* loc = app.add_subcommand("localize", "estimate DOAs in a 4-channel WAVE");
  loc->add_option("--input", flags.input, "4-channel W,X,Y,Z WAVE")->required();
  loc->add_option("--method", flags.method, "histogram or network")->check(CLI::IsMember({"histogram", "network"}));
  loc->add_option("--checkpoint", flags.checkpoint, "checkpoint directory for --method network");
  loc->add_option("--sources", flags.sources, "known source count (overrides [decode])")->check(CLI::PositiveNumber);
  subs.emplace_back(loc, cmd_localize);
  auto* cnt = app.add_subcommand("count-params", "parameter totals against the published table");
  cnt->add_option("--arch", flags.arch, "configuration name, or all");
  subs.emplace_back(cnt, cmd_count_params);
  auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");
  subs.emplace_back(self, cmd_selftest);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    logger->error("usage: {}", e.what());
    return kUsageError;
  }

  Context ctx{{}, flags, &out, logger};
  try {
    if (!flags.config.empty()) {
      require_file(flags.config, "config file");
      ctx.cfg = load_config(flags.config);
    }
    if (!flags.out.empty()) ctx.cfg.out = flags.out;
    if (flags.seed) ctx.cfg.seed = ctx.cfg.dataset.seed = *flags.seed;
    if (flags.jobs) ctx.cfg.jobs = *flags.jobs;
    if (flags.profile == "reduced") {
      ctx.cfg.arch = "reduced";
    } else if (flags.profile == "full" && ctx.cfg.arch == "reduced") {
      ctx.cfg.arch = "6-4";
    }
    ctx.cfg.validate();
    if (!flags.arch.empty() && flags.arch != "all") {
      (void)config_by_name(flags.arch, 1);
    }
  } catch (const MissingInput& e) {
    logger->error("missing input: {}", e.what());
    return kMissingInput;
  } catch (const std::exception& e) {
    logger->error("invalid config: {}", e.what());
    return kConfigError;
  }

  for (const auto& [sub, handler] : subs) {
    if (!sub->parsed()) continue;
    try {
      return handler(ctx);
    } catch (const MissingInput& e) {
      logger->error("missing input: {}", e.what());
      return kMissingInput;
    } catch (const ConfigError& e) {
      logger->error("invalid config: {}", e.what());
      return kConfigError;
    } catch (const TrainingError& e) {
      logger->error("training failed at epoch {}: {}", e.epoch(), e.what());
      return kRuntimeError;
    } catch (const std::exception& e) {
      logger->error("{} failed: {}", sub->get_name(), e.what());
      return kRuntimeError;
    }
  }
  return kUsageError;
}

}  // namespace ambiloc::cli
