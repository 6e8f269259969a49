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

#include <fstream>
#include <sstream>

#include "ambiloc/tensor_io.hpp"
#include "ambiloc/wav.hpp"
#include "ambiloc_cli/cli.hpp"
#include "ambiloc_cli/config.hpp"
#include "oracles.hpp"

namespace ambiloc::cli {
namespace {

struct Run {
  int code;
  std::string out;
  std::string log;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, log;
  const int code = run(args, out, log);
  return {code, out.str(), log.str()};
}

void write_file(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

TEST(Cli, CountParamsReportsDeviation) {
  const auto r = run_cli({"count-params", "--arch", "4-2"});
  ASSERT_EQ(r.code, kOk) << r.log;
  EXPECT_NE(r.out.find("4-2,425,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(",700259,"), std::string::npos) << r.out;
  const auto all = run_cli({"count-params"});
  EXPECT_EQ(std::count(all.out.begin(), all.out.end(), '\n'), 10);
}

TEST(Cli, SelftestPasses) {
  const auto r = run_cli({"selftest"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("checks passed"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, DistinctExitCodes) {
  const auto dir = oracle::scratch_dir("cli-codes");
  EXPECT_EQ(run_cli({}).code, kUsageError);
  const auto unknown = run_cli({"selftest", "--bogus"});
  EXPECT_EQ(unknown.code, kUsageError);
  EXPECT_NE(unknown.log.find("usage"), std::string::npos);
  EXPECT_EQ(run_cli({"localize"}).code, kUsageError);
  EXPECT_EQ(run_cli({"--profile", "huge", "selftest"}).code, kUsageError);

  const auto missing = run_cli({"--config", (dir / "none.ini").string(), "selftest"});
  EXPECT_EQ(missing.code, kMissingInput);
  EXPECT_NE(missing.log.find("missing input"), std::string::npos);
  EXPECT_EQ(run_cli({"--out", dir.string(), "localize", "--input", (dir / "none.wav").string()}).code,
            kMissingInput);
  EXPECT_EQ(run_cli({"--out", dir.string(), "evaluate"}).code, kMissingInput);

  write_file(dir / "bad.ini", "[grid]\nalpha = -3\n");
  const auto bad = run_cli({"--config", (dir / "bad.ini").string(), "selftest"});
  EXPECT_EQ(bad.code, kConfigError);
  EXPECT_NE(bad.log.find("invalid config"), std::string::npos);
  write_file(dir / "typo.ini", "[grid]\nalpah = 10\n");
  EXPECT_EQ(run_cli({"--config", (dir / "typo.ini").string(), "selftest"}).code, kConfigError);
  EXPECT_EQ(run_cli({"count-params", "--arch", "9-9"}).code, kConfigError);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("synth-dataset"), std::string::npos);
}

TEST(Cli, LocalizeAnechoicWithHistogram) {
  const auto dir = oracle::scratch_dir("cli-localize");
  const Direction truth{-75.0, 25.0};
  wav::write_foa(dir / "in.wav", oracle::plane_wave_speech(truth, 1.0, 4));
  const auto r = run_cli({"--out", dir.string(), "localize", "--input", (dir / "in.wav").string()});
  ASSERT_EQ(r.code, kOk) << r.log;
  std::istringstream lines(r.out);
  std::string header, line, extra;
  std::getline(lines, header);
  EXPECT_EQ(header, "sequence,rank,azimuth_deg,elevation_deg,score");
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_FALSE(std::getline(lines, extra)) << "expected one DOA line";
  double az = 0, el = 0;
  ASSERT_EQ(std::sscanf(line.c_str(), "seq000,1,%lf,%lf", &az, &el), 2) << line;
  EXPECT_LE(angular_distance({az, el}, truth), 10.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "doa.csv"));
}

TEST(Cli, SimulateSrirAndExtractFeatures) {
  const auto dir = oracle::scratch_dir("cli-srir");
  write_file(dir / "room.ini", "[experiment]\nout = run\n[room]\nrt60 = 0.3\nduration_s = 0.4\n");
  const auto r = run_cli({"--config", (dir / "room.ini").string(), "simulate-srir"});
  ASSERT_EQ(r.code, kOk) << r.log;
  EXPECT_NE(r.out.find("measured_rt60="), std::string::npos);
  const auto srir = wav::read_foa(dir / "run" / "srir.wav");
  EXPECT_EQ(srir.length(), 6400u);

  wav::write_foa(dir / "speech.wav", oracle::plane_wave_speech({0, 0}, 1.216, 1));
  const auto f = run_cli({"--out", (dir / "feat").string(), "extract-features", "--input",
                          (dir / "speech.wav").string()});
  ASSERT_EQ(f.code, kOk) << f.log;
  const auto tensors = tensor_io::read_container(dir / "feat" / "features.ambt");
  ASSERT_EQ(tensors.size(), 2u);
  EXPECT_EQ(tensors[1].name, "seq001/features");
  EXPECT_EQ(tensors[1].dims, (std::vector<std::uint32_t>{25, 513, 6}));
}

TEST(Config, ParsesSectionsAndResolvesPaths) {
  const auto c = parse_config(
      "[experiment]\nseed = 9\nout = results\njobs = 2\n[grid]\nalpha = 30\n[model]\narch = 6-4\n"
      "[dataset]\ncounts = 5,1,0\ncorpus = speech\nsnr_min_db = 5\n[train]\nmax_epochs = 7\n"
      "[decode]\nmode = threshold\nbeta = 0.4\n[metrics]\ntolerances = 5,10\naccuracy_mode = all_sources\n"
      "[room]\nwall_model = sabine\nhigh_pass = false\n",
      "/base");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.dataset.seed, 9u);
  EXPECT_EQ(c.out, std::filesystem::path("/base/results"));
  EXPECT_EQ(c.dataset.corpus, std::filesystem::path("/base/speech"));
  EXPECT_EQ(c.grid_alpha, 30.0);
  EXPECT_EQ(c.dataset.grid_alpha, 30.0);
  EXPECT_EQ(c.arch, "6-4");
  EXPECT_EQ(c.dataset.counts, (std::array<std::size_t, 3>{5, 1, 0}));
  EXPECT_EQ(c.schedule.max_epochs, 7);
  ASSERT_TRUE(std::holds_alternative<Threshold>(c.decode));
  EXPECT_EQ(std::get<Threshold>(c.decode).beta, 0.4);
  EXPECT_EQ(c.tolerances, (std::vector<double>{5, 10}));
  EXPECT_EQ(c.accuracy_mode, AccuracyMode::AllSourcesPerSequence);
  EXPECT_EQ(c.srir.wall_model, WallModel::Sabine);
  EXPECT_FALSE(c.srir.high_pass);
}

TEST(Config, CanonicalTextReparses) {
  auto c = parse_config("[grid]\nalpha = 30\n[dataset]\ncounts = 3,2,1\nrt60_max = 0.45\n[train]\nbatch_size = 8\n");
  const auto again = parse_config(to_ini(c));
  EXPECT_EQ(to_ini(again), to_ini(c));
  EXPECT_EQ(again.dataset.room.rt60_max, 0.45);
  EXPECT_EQ(again.schedule.batch_size, 8u);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[nope]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[train]\nmax_epochs = many\n"), ConfigError);
  EXPECT_THROW(parse_config("[decode]\nmode = guess\n"), ConfigError);
  EXPECT_THROW(parse_config("[metrics]\naccuracy_mode = best\n"), ConfigError);
  EXPECT_THROW(parse_config("[dataset]\ncounts = 1,x,0\n"), ConfigError);
  EXPECT_THROW(parse_config("[room]\nwall_model = eyring\n"), ConfigError);
  EXPECT_THROW(parse_config("not ini ["), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
  auto c = parse_config("[model]\narch = 9-9\n");
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace ambiloc::cli
