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
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambiloc/arch.hpp"
#include "ambiloc/dataset.hpp"
#include "ambiloc/decode.hpp"
#include "ambiloc/metrics.hpp"
#include "ambiloc/network.hpp"

namespace ambiloc {

struct TrainSchedule {
  int stop_patience = 20;
  int lr_patience = 10;
  int max_epochs = 300;
  double learning_rate = 1e-3;
  double lr_factor = 0.5;
  std::size_t batch_size = 32;
  /// Monitored metric: validation accuracy below this angular error.
  double tolerance_deg = 15.0;
  /// Wall-clock budget checked after each epoch; non-positive disables it.
  /// A capped run is not reproducible across machines.
  double max_seconds = 0.0;

  /// Throws std::invalid_argument unless both patiences are positive,
  /// lr_patience < stop_patience, and the remaining values are in range.
  void validate() const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moments with per-parameter bias correction.
class Adam {
 public:
  explicit Adam(const NetworkParams<float>& like, AdamConfig cfg = {});
  void step(NetworkParams<float>& params, const NetworkParams<float>& grads, double learning_rate);
  long steps() const { return t_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

/// Tracks the monitored metric (higher is better, strict improvement) and
/// applies the halving and stopping patience rules.
class PlateauMonitor {
 public:
  enum class Action { Improved, Wait, HalveRate, Stop };
  explicit PlateauMonitor(const TrainSchedule& s);
  Action observe(double metric);
  double best() const { return best_; }
  int epochs_since_improvement() const { return stale_; }

 private:
  int lr_patience_;
  int stop_patience_;
  double best_;
  int stale_ = 0;
  int stale_since_halving_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_accuracy = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  NetworkParams<float> best;
  int best_epoch = 0;
  double best_validation_accuracy = 0.0;
  std::vector<EpochRecord> history;
  bool stopped_early = false;
  bool hit_time_cap = false;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch) : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training from `seed` with the patience rules of `schedule`.
/// Returns the parameters of the best validation epoch. Throws
/// TrainingError carrying the epoch when the loss becomes non-finite.
TrainResult train(const ArchConfig& arch, std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> validation_set, const SphericalGrid& grid,
                  const TrainSchedule& schedule, std::uint64_t seed, int jobs = 1, const EpochCallback& on_epoch = {});

/// Forward pass, frame averaging and peak picking for every sequence. In
/// known-count mode each sequence uses its own truth count.
std::vector<EvalRecord> evaluate_sequences(const NetworkParams<float>& params, std::span<const LabeledSequence> seqs,
                                           const PeakPicker& picker, const PeakMode& mode, int jobs = 1);

/// Pooled accuracy in percent at one tolerance with known source counts.
double localization_accuracy(const NetworkParams<float>& params, std::span<const LabeledSequence> seqs,
                             const PeakPicker& picker, double tolerance_deg, int jobs = 1);

/// "epoch,train_loss,validation_accuracy,learning_rate" rows.
std::string history_csv(const std::vector<EpochRecord>& history);

struct CheckpointMeta {
  std::string config;
  int epoch = 0;
  double validation_accuracy = 0.0;
  double grid_alpha = 0.0;
};

inline constexpr const char* kCheckpointTensors = "checkpoint.ambt";
inline constexpr const char* kCheckpointManifest = "checkpoint.txt";

/// Writes named parameter tensors and a key=value manifest that also
/// records the full layout.
void save_checkpoint(const std::filesystem::path& dir, const NetworkParams<float>& params, const CheckpointMeta& meta);

struct Checkpoint {
  NetworkParams<float> params;
  CheckpointMeta meta;
};
/// Throws std::runtime_error on missing files or tensors that do not match
/// the recorded layout.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace ambiloc
