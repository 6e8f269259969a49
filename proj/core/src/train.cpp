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

#include "ambiloc/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "ambiloc/parallel.hpp"
#include "ambiloc/tensor_io.hpp"

namespace ambiloc {

void TrainSchedule::validate() const {
  if (stop_patience <= 0 || lr_patience <= 0) throw std::invalid_argument("schedule: patience values must be positive");
  if (lr_patience >= stop_patience) throw std::invalid_argument("schedule: halving patience must be below stop patience");
  if (max_epochs <= 0) throw std::invalid_argument("schedule: max_epochs must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("schedule: learning rate must be finite and non-negative");
  }
  if (!(lr_factor > 0.0 && lr_factor < 1.0)) throw std::invalid_argument("schedule: lr_factor must lie in (0, 1)");
  if (batch_size == 0) throw std::invalid_argument("schedule: batch_size must be positive");
  if (!(tolerance_deg > 0.0)) throw std::invalid_argument("schedule: tolerance must be positive");
}

Adam::Adam(const NetworkParams<float>& like, AdamConfig cfg) : cfg_(cfg) {
  for (const auto& t : like.tensors()) {
    m_.emplace_back(t.values.size(), 0.0);
    v_.emplace_back(t.values.size(), 0.0);
  }
}

void Adam::step(NetworkParams<float>& params, const NetworkParams<float>& grads, double learning_rate) {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  auto& pt = params.tensors();
  const auto& gt = grads.tensors();
  for (std::size_t k = 0; k < pt.size(); ++k) {
    auto& p = pt[k].values;
    const auto& g = gt[k].values;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
      const double update = learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.epsilon);
      p[i] = static_cast<float>(p[i] - update);
    }
  }
}

PlateauMonitor::PlateauMonitor(const TrainSchedule& s)
    : lr_patience_(s.lr_patience), stop_patience_(s.stop_patience), best_(-std::numeric_limits<double>::infinity()) {}

PlateauMonitor::Action PlateauMonitor::observe(double metric) {
  if (metric > best_) {
    best_ = metric;
    stale_ = 0;
    stale_since_halving_ = 0;
    return Action::Improved;
  }
  ++stale_;
  ++stale_since_halving_;
  if (stale_ >= stop_patience_) return Action::Stop;
  if (stale_since_halving_ >= lr_patience_) {
    stale_since_halving_ = 0;
    return Action::HalveRate;
  }
  return Action::Wait;
}

std::vector<EvalRecord> evaluate_sequences(const NetworkParams<float>& params, std::span<const LabeledSequence> seqs,
                                           const PeakPicker& picker, const PeakMode& mode, int jobs) {
  std::vector<EvalRecord> out(seqs.size());
  parallel_for(seqs.size(), jobs, [&](std::size_t i) {
    const auto& s = seqs[i];
    const auto scores = average_frames(forward(params, s.features));
    const PeakMode m = std::holds_alternative<KnownCount>(mode) ? PeakMode{KnownCount{s.truth.size()}} : mode;
    std::vector<Direction> est;
    for (const auto& e : to_estimates(picker.pick(scores, m), picker.grid())) est.push_back(e.direction);
    out[i] = EvalRecord::make(s.id, s.truth, std::move(est));
  });
  return out;
}

double localization_accuracy(const NetworkParams<float>& params, std::span<const LabeledSequence> seqs,
                             const PeakPicker& picker, double tolerance_deg, int jobs) {
  const auto records = evaluate_sequences(params, seqs, picker, KnownCount{1}, jobs);
  return summarize(records, {tolerance_deg}).accuracy_percent.front();
}

TrainResult train(const ArchConfig& arch, std::span<const LabeledSequence> train_set,
                  std::span<const LabeledSequence> validation_set, const SphericalGrid& grid,
                  const TrainSchedule& schedule, std::uint64_t seed, int jobs, const EpochCallback& on_epoch) {
  schedule.validate();
  arch.validate();
  if (train_set.empty() || validation_set.empty()) throw std::invalid_argument("train: empty train or validation set");
  if (static_cast<std::size_t>(arch.class_count) != grid.class_count()) {
    throw std::invalid_argument("train: class count differs from the grid");
  }
  const auto started = std::chrono::steady_clock::now();
  const PeakPicker picker(grid);

  TrainResult result;
  NetworkParams<float> params = NetworkParams<float>::initialized(arch, seed);
  result.best = params;
  Adam adam(params);
  PlateauMonitor monitor(schedule);
  double lr = schedule.learning_rate;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<BatchItem> batch;

  for (int epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (std::size_t first = 0; first < order.size(); first += schedule.batch_size) {
      const std::size_t last = std::min(order.size(), first + schedule.batch_size);
      batch.clear();
      for (std::size_t i = first; i < last; ++i) {
        const auto& s = train_set[order[i]];
        batch.push_back({&s.features, s.target});
      }
      const auto lg = loss_and_gradients(params, std::span<const BatchItem>(batch), jobs);
      if (!std::isfinite(static_cast<double>(lg.loss))) {
        throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch), epoch);
      }
      loss_sum += static_cast<double>(lg.loss) * static_cast<double>(batch.size());
      adam.step(params, lg.gradients, lr);
    }
    if (!params.all_finite()) {
      throw TrainingError("train: non-finite parameters at epoch " + std::to_string(epoch), epoch);
    }

    EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()),
                    localization_accuracy(params, validation_set, picker, schedule.tolerance_deg, jobs), lr};
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    const auto action = monitor.observe(rec.validation_accuracy);
    if (action == PlateauMonitor::Action::Improved) {
      result.best = params;
      result.best_epoch = epoch;
      result.best_validation_accuracy = rec.validation_accuracy;
    } else if (action == PlateauMonitor::Action::HalveRate) {
      lr *= schedule.lr_factor;
    } else if (action == PlateauMonitor::Action::Stop) {
      result.stopped_early = true;
      break;
    }
    if (schedule.max_seconds > 0.0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
      if (elapsed.count() > schedule.max_seconds) {
        result.hit_time_cap = true;
        break;
      }
    }
  }
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "epoch,train_loss,validation_accuracy,learning_rate\n";
  char line[160];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%d,%.9g,%.6f,%.9g\n", r.epoch, r.train_loss, r.validation_accuracy,
                  r.learning_rate);
    os << line;
  }
  return os.str();
}

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const NetworkParams<float>& params, const CheckpointMeta& meta) {
  std::filesystem::create_directories(dir);
  std::vector<tensor_io::Tensor> tensors;
  for (const auto& t : params.tensors()) {
    std::vector<std::uint32_t> dims(t.dims.begin(), t.dims.end());
    tensors.push_back({t.name, std::move(dims), t.values});
  }
  tensor_io::write_container(dir / kCheckpointTensors, tensors);

  const auto& a = params.arch();
  std::ofstream os(dir / kCheckpointManifest);
  char buf[64];
  os << "config=" << meta.config << "\n";
  os << "epoch=" << meta.epoch << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", meta.validation_accuracy);
  os << "validation_accuracy=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", meta.grid_alpha);
  os << "grid_alpha=" << buf << "\n";
  os << "arch_name=" << a.name << "\n";
  os << "pool_sizes=" << join_ints(a.pool_sizes) << "\n";
  os << "conv_filters=" << a.conv_filters << "\n";
  os << "kernel_size=" << a.kernel_size << "\n";
  os << "input_frames=" << a.input_frames << "\n";
  os << "input_bins=" << a.input_bins << "\n";
  os << "input_channels=" << a.input_channels << "\n";
  os << "rnn_layers=" << a.rnn_layers << "\n";
  os << "rnn_hidden=" << a.rnn_hidden << "\n";
  os << "dense_widths=" << join_ints(a.dense_widths) << "\n";
  os << "class_count=" << a.class_count << "\n";
  os << "parameters=" << params.size() << "\n";
  if (!os) throw std::runtime_error("checkpoint: write failed in " + dir.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / kCheckpointManifest);
  if (!in) throw std::runtime_error("checkpoint: no manifest in " + dir.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("checkpoint: manifest lacks '" + key + "'");
    return it->second;
  };

  Checkpoint cp;
  cp.meta.config = get("config");
  cp.meta.epoch = std::stoi(get("epoch"));
  cp.meta.validation_accuracy = std::stod(get("validation_accuracy"));
  cp.meta.grid_alpha = std::stod(get("grid_alpha"));
  ArchConfig a;
  a.name = get("arch_name");
  a.pool_sizes = parse_ints(get("pool_sizes"));
  a.conv_filters = std::stoi(get("conv_filters"));
  a.kernel_size = std::stoi(get("kernel_size"));
  a.input_frames = std::stoi(get("input_frames"));
  a.input_bins = std::stoi(get("input_bins"));
  a.input_channels = std::stoi(get("input_channels"));
  a.rnn_layers = std::stoi(get("rnn_layers"));
  a.rnn_hidden = std::stoi(get("rnn_hidden"));
  a.dense_widths = parse_ints(get("dense_widths"));
  a.class_count = std::stoi(get("class_count"));
  a.validate();

  cp.params = NetworkParams<float>::zeros(a);
  const auto tensors = tensor_io::read_container(dir / kCheckpointTensors);
  auto& dst = cp.params.tensors();
  if (tensors.size() != dst.size()) throw std::runtime_error("checkpoint: tensor count does not match layout");
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const std::vector<std::size_t> dims(tensors[i].dims.begin(), tensors[i].dims.end());
    if (tensors[i].name != dst[i].name || dims != dst[i].dims) {
      throw std::runtime_error("checkpoint: tensor '" + tensors[i].name + "' does not match layout");
    }
    dst[i].values = tensors[i].values;
  }
  return cp;
}

}  // namespace ambiloc
