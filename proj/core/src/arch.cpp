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

#include "ambiloc/arch.hpp"

#include <numeric>
#include <stdexcept>

namespace ambiloc {

namespace {

const std::vector<PublishedConfig>& table() {
  static const std::vector<PublishedConfig> configs{
      {"4-2", 700259, {8, 4, 4, 2}},          {"4-4", 765795, {4, 4, 4, 2}},
      {"4-8", 896867, {4, 4, 2, 2}},          {"5-2", 774315, {4, 4, 4, 2, 2}},
      {"5-4", 839851, {4, 4, 2, 2, 2}},       {"6-2", 848371, {4, 4, 2, 2, 2, 2}},
      {"6-4", 913907, {4, 2, 2, 2, 2, 2}},    {"7-2", 922427, {4, 2, 2, 2, 2, 2, 2}},
      {"7-4", 987963, {2, 2, 2, 2, 2, 2, 2}},
  };
  return configs;
}

}  // namespace

int ArchConfig::final_bins() const {
  int q = input_bins;
  for (const int p : pool_sizes) {
    if (p < 1) throw std::invalid_argument("arch: pool size must be at least 1");
    q /= p;
  }
  if (q < 1) throw std::invalid_argument("arch: pooling reduces frequency below 1");
  return q;
}

void ArchConfig::validate() const {
  if (pool_sizes.empty()) throw std::invalid_argument("arch: at least one block required");
  if (conv_filters < 1 || kernel_size < 1 || kernel_size % 2 == 0) {
    throw std::invalid_argument("arch: filters must be positive and the kernel odd");
  }
  if (input_frames < 1 || input_bins < 1 || input_channels < 1) throw std::invalid_argument("arch: empty input");
  if (rnn_layers < 0 || (rnn_layers > 0 && rnn_hidden < 1)) throw std::invalid_argument("arch: bad recurrent setup");
  for (const int w : dense_widths) {
    if (w < 1) throw std::invalid_argument("arch: dense widths must be positive");
  }
  if (dense_widths.empty() || dense_widths.back() != class_count) {
    throw std::invalid_argument("arch: last dense layer must have class_count outputs");
  }
  (void)final_bins();
}

std::span<const PublishedConfig> published_configs() { return table(); }

ArchConfig named_config(std::string_view name, int class_count) {
  for (const auto& entry : table()) {
    if (entry.name == name) {
      ArchConfig cfg;
      cfg.name = std::string(name);
      cfg.pool_sizes = entry.pools;
      cfg.class_count = class_count;
      cfg.dense_widths = {class_count, class_count};
      return cfg;
    }
  }
  throw std::invalid_argument("arch: unknown configuration '" + std::string(name) + "'");
}

ArchConfig reduced_config(int class_count) {
  ArchConfig cfg;
  cfg.name = "reduced";
  cfg.pool_sizes = {8, 8};
  cfg.conv_filters = 16;
  cfg.rnn_hidden = 16;
  cfg.class_count = class_count;
  cfg.dense_widths = {class_count, class_count};
  return cfg;
}

ArchConfig config_by_name(std::string_view name, int class_count) {
  return name == "reduced" ? reduced_config(class_count) : named_config(name, class_count);
}

std::vector<int> frequency_trace(const ArchConfig& cfg) {
  std::vector<int> trace{cfg.input_bins};
  for (const int p : cfg.pool_sizes) {
    if (p < 1) throw std::invalid_argument("arch: pool size must be at least 1");
    trace.push_back(trace.back() / p);
    if (trace.back() < 1) throw std::invalid_argument("arch: pooling reduces frequency below 1");
  }
  return trace;
}

std::vector<LayerShape> shape_propagate(const ArchConfig& cfg) {
  const auto trace = frequency_trace(cfg);
  const int T = cfg.input_frames;
  std::vector<LayerShape> shapes{{"input", T, cfg.input_bins, cfg.input_channels}};
  for (int b = 0; b < cfg.blocks(); ++b) {
    const std::string prefix = "block" + std::to_string(b + 1) + "/";
    shapes.push_back({prefix + "conv1", T, trace[b], cfg.conv_filters});
    shapes.push_back({prefix + "conv2", T, trace[b], cfg.conv_filters});
    shapes.push_back({prefix + "pool", T, trace[b + 1], cfg.conv_filters});
  }
  shapes.push_back({"flatten", T, 1, cfg.conv_filters * trace.back()});
  for (int r = 0; r < cfg.rnn_layers; ++r) {
    shapes.push_back({"bilstm" + std::to_string(r + 1), T, 1, 2 * cfg.rnn_hidden});
  }
  for (std::size_t d = 0; d < cfg.dense_widths.size(); ++d) {
    shapes.push_back({"dense" + std::to_string(d + 1), T, 1, cfg.dense_widths[d]});
  }
  return shapes;
}

std::size_t ParamSpec::size() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<ParamSpec> parameter_layout(const ArchConfig& cfg) {
  const auto trace = frequency_trace(cfg);
  const auto k = static_cast<std::size_t>(cfg.kernel_size);
  const auto filters = static_cast<std::size_t>(cfg.conv_filters);
  std::vector<ParamSpec> layout;

  std::size_t in_ch = static_cast<std::size_t>(cfg.input_channels);
  for (int b = 0; b < cfg.blocks(); ++b) {
    for (int c = 1; c <= 2; ++c) {
      const std::string prefix = "block" + std::to_string(b + 1) + "/conv" + std::to_string(c) + "/";
      layout.push_back({prefix + "kernel", {k, k, in_ch, filters}, k * k * in_ch});
      layout.push_back({prefix + "bias", {filters}, k * k * in_ch});
      in_ch = filters;
    }
  }

  std::size_t width = filters * static_cast<std::size_t>(trace.back());
  const auto hidden = static_cast<std::size_t>(cfg.rnn_hidden);
  for (int r = 0; r < cfg.rnn_layers; ++r) {
    for (const char* dir : {"forward", "backward"}) {
      const std::string prefix = "bilstm" + std::to_string(r + 1) + "/" + dir + "/";
      layout.push_back({prefix + "input_kernel", {width, 4 * hidden}, width});
      layout.push_back({prefix + "recurrent_kernel", {hidden, 4 * hidden}, hidden});
      layout.push_back({prefix + "bias", {4 * hidden}, width});
    }
    width = 2 * hidden;
  }

  for (std::size_t d = 0; d < cfg.dense_widths.size(); ++d) {
    const auto out = static_cast<std::size_t>(cfg.dense_widths[d]);
    const std::string prefix = "dense" + std::to_string(d + 1) + "/";
    layout.push_back({prefix + "kernel", {width, out}, width});
    layout.push_back({prefix + "bias", {out}, width});
    width = out;
  }
  return layout;
}

std::size_t count_parameters(const ArchConfig& cfg) {
  std::size_t total = 0;
  for (const auto& p : parameter_layout(cfg)) total += p.size();
  return total;
}

}  // namespace ambiloc
