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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ambiloc {

/// Layout of the convolutional-recurrent classifier.
///
/// B blocks of two same-padded k x k convolutions (rectified) followed by a
/// 1 x P_i max-pool along frequency; then bidirectional LSTM layers over the
/// frame axis; then per-frame dense layers, tanh on hidden ones, logistic on
/// the last.
struct ArchConfig {
  std::string name;
  std::vector<int> pool_sizes;
  int conv_filters = 64;
  int kernel_size = 3;
  int input_frames = 25;
  int input_bins = 513;
  int input_channels = 6;
  int rnn_layers = 2;
  int rnn_hidden = 64;
  std::vector<int> dense_widths;
  int class_count = 0;

  int blocks() const { return static_cast<int>(pool_sizes.size()); }
  /// Frequency width after the last pool; throws if it drops below 1.
  int final_bins() const;
  int rnn_input_width() const { return conv_filters * final_bins(); }
  /// Throws std::invalid_argument for inconsistent settings, including a
  /// last dense width different from class_count.
  void validate() const;
};

struct PublishedConfig {
  std::string_view name;
  long parameters;
  std::vector<int> pools;
};

/// The nine block/pool layouts with their published parameter totals.
std::span<const PublishedConfig> published_configs();

/// One of the nine published names ("4-2" ... "7-4") with dense widths
/// (C, C). Throws std::invalid_argument for unknown names.
ArchConfig named_config(std::string_view name, int class_count);

/// Desk-scale profile: 2 blocks pooling 8 and 8, 16 filters, 16 hidden units.
ArchConfig reduced_config(int class_count);

/// named_config or reduced_config depending on the name ("reduced").
ArchConfig config_by_name(std::string_view name, int class_count);

/// 513, q_1, ..., q_B with q_i = floor(q_{i-1} / P_i).
std::vector<int> frequency_trace(const ArchConfig& cfg);

struct LayerShape {
  std::string layer;
  int frames = 0;
  int width = 0;     // frequency bins for conv layers, 1 afterwards
  int channels = 0;  // filters, or features per frame
};

/// Output shape of every layer, input first.
std::vector<LayerShape> shape_propagate(const ArchConfig& cfg);

struct ParamSpec {
  std::string name;
  std::vector<std::size_t> dims;
  /// Inputs feeding one output unit, used for initialization scaling.
  std::size_t fan_in = 0;

  std::size_t size() const;
};

/// Named parameter tensors in storage order.
std::vector<ParamSpec> parameter_layout(const ArchConfig& cfg);

std::size_t count_parameters(const ArchConfig& cfg);

}  // namespace ambiloc
