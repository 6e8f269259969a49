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

#include <cmath>
#include <fstream>
#include <limits>

#include "ambiloc/dataset.hpp"
#include "ambiloc/features.hpp"
#include "ambiloc/train.hpp"
#include "oracles.hpp"

namespace ambiloc {
namespace {

std::vector<LabeledSequence> toy_sequences(std::size_t examples, std::uint64_t seed) {
  DatasetSpec spec;
  spec.seed = seed;
  spec.counts = {examples, 0, 0};
  spec.grid_alpha = 30.0;
  spec.room.rt60_max = 0.3;
  spec.snr_min_db = 15.0;
  spec.synthetic_corpus_size = 8;
  spec.synthetic_corpus_seconds = 2.0;
  return synthesize_sequences(spec);
}

TEST(PlateauMonitor, HalvesAfterTenAndStopsAfterTwenty) {
  const TrainSchedule s;
  PlateauMonitor m(s);
  EXPECT_EQ(m.observe(50.0), PlateauMonitor::Action::Improved);
  for (int i = 1; i <= 9; ++i) EXPECT_EQ(m.observe(50.0), PlateauMonitor::Action::Wait) << i;
  EXPECT_EQ(m.observe(49.0), PlateauMonitor::Action::HalveRate);
  for (int i = 11; i <= 19; ++i) EXPECT_EQ(m.observe(50.0), PlateauMonitor::Action::Wait) << i;
  EXPECT_EQ(m.observe(50.0), PlateauMonitor::Action::Stop);
  EXPECT_EQ(m.best(), 50.0);
  EXPECT_EQ(m.epochs_since_improvement(), 20);
}

TEST(PlateauMonitor, ImprovementResetsCounters) {
  PlateauMonitor m(TrainSchedule{});
  m.observe(1.0);
  for (int i = 0; i < 9; ++i) m.observe(1.0);
  EXPECT_EQ(m.observe(1.5), PlateauMonitor::Action::Improved);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(m.observe(1.0), PlateauMonitor::Action::Wait);
  EXPECT_EQ(m.observe(1.0), PlateauMonitor::Action::HalveRate);
}

TEST(TrainSchedule, Validation) {
  TrainSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.lr_patience = 20;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = TrainSchedule{};
  s.batch_size = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = TrainSchedule{};
  s.learning_rate = -1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

class TrainLoop : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { data_ = new std::vector<LabeledSequence>(toy_sequences(10, 5)); }
  static void TearDownTestSuite() { delete data_; }
  static std::vector<LabeledSequence>* data_;
};
std::vector<LabeledSequence>* TrainLoop::data_ = nullptr;

TEST_F(TrainLoop, PlateauHalvesRateThenStops) {
  const SphericalGrid grid(30);
  TrainSchedule s;
  s.learning_rate = 1e-30;  // parameters effectively frozen, so accuracy never improves
  const std::span<const LabeledSequence> all(*data_);
  const auto r = train(reduced_config(51), all.subspan(0, 4), all.subspan(4, 4), grid, s, 3);
  ASSERT_TRUE(r.stopped_early);
  ASSERT_EQ(r.best_epoch, 1);
  ASSERT_EQ(r.history.size(), 21u);
  for (std::size_t e = 0; e < 11; ++e) EXPECT_EQ(r.history[e].learning_rate, 1e-30) << e + 1;
  // Ten epochs after the last improvement the eleventh runs at half rate.
  EXPECT_EQ(r.history[11].learning_rate, 0.5e-30);
  EXPECT_EQ(r.history[20].learning_rate, 0.5e-30);
}

TEST(TrainLearning, FitsAnechoicSourcesOnGridPoints) {
  // Twenty clean plane waves at distinct class centres: the accuracy ceiling
  // is 100%, chance is about 2%.
  const SphericalGrid grid(30);
  std::vector<LabeledSequence> data;
  for (std::size_t i = 0; i < 20; ++i) {
    const Direction d = grid.point(2 * i + 3);
    LabeledSequence s;
    s.id = "pw" + std::to_string(i);
    s.features = extract_features(oracle::plane_wave_speech(d, 1.216, i + 1))[0];
    s.truth = {d};
    s.target = make_target(grid, s.truth);
    data.push_back(std::move(s));
  }
  TrainSchedule s;
  s.batch_size = 4;
  s.max_epochs = 40;
  s.lr_patience = 30;
  s.stop_patience = 40;
  const auto r = train(reduced_config(51), data, data, grid, s, 7);
  ASSERT_EQ(r.history.size(), 40u);
  EXPECT_LT(r.history.back().train_loss, 0.6 * r.history.front().train_loss);
  EXPECT_GE(r.best_validation_accuracy, 50.0) << "best epoch " << r.best_epoch;
  const PeakPicker picker(grid);
  EXPECT_EQ(localization_accuracy(r.best, data, picker, 15.0), r.best_validation_accuracy);
}

TEST_F(TrainLoop, Deterministic) {
  const SphericalGrid grid(30);
  TrainSchedule s;
  s.max_epochs = 2;
  const std::span<const LabeledSequence> all(*data_);
  const auto a = train(reduced_config(51), all.subspan(0, 6), all.subspan(6, 4), grid, s, 11);
  const auto b = train(reduced_config(51), all.subspan(0, 6), all.subspan(6, 4), grid, s, 11, 2);
  EXPECT_TRUE(a.best == b.best);
  EXPECT_EQ(history_csv(a.history), history_csv(b.history));
}

TEST_F(TrainLoop, NonFiniteLossNamesEpoch) {
  const SphericalGrid grid(30);
  auto poisoned = std::vector<LabeledSequence>(data_->begin(), data_->begin() + 3);
  poisoned[1].features.values[100] = std::numeric_limits<float>::quiet_NaN();
  try {
    train(reduced_config(51), poisoned, poisoned, grid, TrainSchedule{}, 1);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.epoch(), 1);
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos);
  }
}

TEST_F(TrainLoop, RejectsMismatchedInputs) {
  const std::span<const LabeledSequence> all(*data_);
  EXPECT_THROW(train(reduced_config(51), all.subspan(0, 0), all, SphericalGrid(30), TrainSchedule{}, 1),
               std::invalid_argument);
  EXPECT_THROW(train(reduced_config(51), all, all, SphericalGrid(10), TrainSchedule{}, 1), std::invalid_argument);
}

TEST(HistoryCsv, Format) {
  const std::vector<EpochRecord> h{{1, 0.5, 12.5, 1e-3}, {2, 0.25, 50.0, 5e-4}};
  EXPECT_EQ(history_csv(h),
            "epoch,train_loss,validation_accuracy,learning_rate\n1,0.5,12.500000,0.001\n2,0.25,50.000000,0.0005\n");
}

TEST(Checkpoint, RoundTrip) {
  const auto dir = oracle::scratch_dir("checkpoint");
  const auto params = NetworkParams<float>::initialized(reduced_config(51), 9);
  save_checkpoint(dir, params, {"reduced", 17, 88.5, 30.0});
  const auto ck = load_checkpoint(dir);
  EXPECT_TRUE(ck.params == params);
  EXPECT_EQ(ck.meta.config, "reduced");
  EXPECT_EQ(ck.meta.epoch, 17);
  EXPECT_EQ(ck.meta.validation_accuracy, 88.5);
  EXPECT_EQ(ck.meta.grid_alpha, 30.0);
  EXPECT_EQ(ck.params.arch().class_count, 51);
}

TEST(Checkpoint, Errors) {
  const auto dir = oracle::scratch_dir("checkpoint-bad");
  EXPECT_THROW(load_checkpoint(dir / "missing"), std::runtime_error);
  save_checkpoint(dir, NetworkParams<float>::initialized(reduced_config(51), 1), {"reduced", 1, 0.0, 30.0});
  // Same tensors, different recorded layout.
  save_checkpoint(dir / "other", NetworkParams<float>::initialized(reduced_config(7), 1), {"reduced", 1, 0.0, 90.0});
  std::filesystem::copy_file(dir / "other" / kCheckpointManifest, dir / kCheckpointManifest,
                             std::filesystem::copy_options::overwrite_existing);
  EXPECT_THROW(load_checkpoint(dir), std::runtime_error);
}

}  // namespace
}  // namespace ambiloc
