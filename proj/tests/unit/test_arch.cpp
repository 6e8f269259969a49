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

#include <string>

#include "ambiloc/arch.hpp"

namespace ambiloc {
namespace {

TEST(Arch, FrequencyTraces) {
  EXPECT_EQ(frequency_trace(named_config("4-2", 425)), (std::vector<int>{513, 64, 16, 4, 2}));
  EXPECT_EQ(frequency_trace(named_config("7-4", 425)), (std::vector<int>{513, 256, 128, 64, 32, 16, 8, 4}));
}

TEST(Arch, NameSuffixIsFinalWidth) {
  for (const auto& p : published_configs()) {
    const auto cfg = named_config(p.name, 425);
    const std::string name(p.name);
    EXPECT_EQ(cfg.blocks(), std::stoi(name.substr(0, 1))) << name;
    EXPECT_EQ(cfg.final_bins(), std::stoi(name.substr(2))) << name;
    const auto shapes = shape_propagate(cfg);
    const auto& flat = shapes[1 + 3 * static_cast<std::size_t>(cfg.blocks()) - 1];
    EXPECT_EQ(flat.frames, 25);
    EXPECT_EQ(flat.width, cfg.final_bins());
    EXPECT_EQ(flat.channels, 64);
    EXPECT_EQ(shapes.back().frames, 25);
    EXPECT_EQ(shapes.back().channels, 425);
  }
}

TEST(Arch, PublishedCountsWithinTwoPercent) {
  for (const auto& p : published_configs()) {
    const auto n = static_cast<double>(count_parameters(named_config(p.name, 425)));
    EXPECT_LT(std::abs(n - static_cast<double>(p.parameters)) / static_cast<double>(p.parameters), 0.02) << p.name;
  }
}

TEST(Arch, DoublingFinalWidthDeltas) {
  const auto count = [](const char* n) { return static_cast<long>(count_parameters(named_config(n, 425))); };
  EXPECT_EQ(count("4-4") - count("4-2"), 65536);
  EXPECT_EQ(count("4-8") - count("4-4"), 131072);
  EXPECT_EQ(count("5-4") - count("5-2"), 65536);
  EXPECT_EQ(count("6-4") - count("6-2"), 65536);
  EXPECT_EQ(count("7-4") - count("7-2"), 65536);
}

TEST(Arch, ToyConfigHandCount) {
  ArchConfig toy;
  toy.name = "toy";
  toy.pool_sizes = {1};
  toy.conv_filters = 2;
  toy.rnn_layers = 0;
  toy.class_count = 3;
  toy.dense_widths = {3};
  toy.input_bins = 4;
  // conv1 3*3*6*2+2, conv2 3*3*2*2+2, dense (2*4)*3+3.
  EXPECT_EQ(count_parameters(toy), (3u * 3 * 6 * 2 + 2) + (3u * 3 * 2 * 2 + 2) + (8u * 3 + 3));
}

TEST(Arch, Errors) {
  EXPECT_THROW(named_config("5-8", 425), std::invalid_argument);
  auto cfg = named_config("4-2", 425);
  cfg.pool_sizes = {8, 8, 8, 8};
  EXPECT_THROW(cfg.final_bins(), std::invalid_argument);
  EXPECT_THROW(frequency_trace(cfg), std::invalid_argument);
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = named_config("4-2", 425);
  cfg.dense_widths = {425, 424};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = named_config("4-2", 425);
  cfg.kernel_size = 4;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_NO_THROW(reduced_config(51).validate());
  EXPECT_EQ(config_by_name("reduced", 51).name, "reduced");
}

TEST(Arch, LayoutNamesAndSizes) {
  const auto cfg = reduced_config(51);
  const auto layout = parameter_layout(cfg);
  EXPECT_EQ(layout.front().name, "block1/conv1/kernel");
  EXPECT_EQ(layout.front().dims, (std::vector<std::size_t>{3, 3, 6, 16}));
  EXPECT_EQ(layout.back().name, "dense2/bias");
  std::size_t total = 0;
  for (const auto& p : layout) total += p.size();
  EXPECT_EQ(total, count_parameters(cfg));
}

}  // namespace
}  // namespace ambiloc
