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

#include <cstring>
#include <fstream>

#include "ambiloc/tensor_io.hpp"
#include "oracles.hpp"

namespace ambiloc {
namespace {

using tensor_io::Tensor;

std::vector<Tensor> sample_tensors() {
  return {{"a/features", {2, 3}, {1.5f, -2.0f, 0.0f, 1e-30f, 3.25f, -0.0f}}, {"scalar", {}, {7.0f}}};
}

TEST(TensorIo, RoundTripIsBitExact) {
  const auto dir = oracle::scratch_dir("tio");
  const auto in = sample_tensors();
  tensor_io::write_container(dir / "t.ambt", in);
  const auto out = tensor_io::read_container(dir / "t.ambt");
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(out[i].name, in[i].name);
    EXPECT_EQ(out[i].dims, in[i].dims);
    ASSERT_EQ(out[i].values.size(), in[i].values.size());
    EXPECT_EQ(std::memcmp(out[i].values.data(), in[i].values.data(), in[i].values.size() * 4), 0);
  }
  EXPECT_EQ(in[1].element_count(), 1u);
}

TEST(TensorIo, HeaderLayout) {
  const auto dir = oracle::scratch_dir("tio-header");
  tensor_io::write_container(dir / "t.ambt", sample_tensors());
  std::ifstream f(dir / "t.ambt", std::ios::binary);
  char head[10];
  f.read(head, 10);
  EXPECT_EQ(std::string(head, 4), "AMBT");
  EXPECT_EQ(head[4], 1);
  EXPECT_EQ(head[5], 0);
  EXPECT_EQ(head[6], 2);
}

TEST(TensorIo, WriterOffsetsAndRandomAccess) {
  const auto dir = oracle::scratch_dir("tio-writer");
  const auto in = sample_tensors();
  std::vector<std::uint64_t> offsets;
  {
    tensor_io::ContainerWriter w(dir / "t.ambt");
    for (const auto& t : in) offsets.push_back(w.append(t));
    w.close();
  }
  EXPECT_EQ(offsets[0], tensor_io::ContainerReader::kFirstRecord);
  tensor_io::ContainerReader r(dir / "t.ambt");
  EXPECT_EQ(r.tensor_count(), 2u);
  EXPECT_EQ(r.read_at(offsets[1]).name, "scalar");
  EXPECT_EQ(r.read_at(offsets[0]).values, in[0].values);
  EXPECT_THROW(r.read_at(1u << 20), tensor_io::FormatError);
}

TEST(TensorIo, Errors) {
  const auto dir = oracle::scratch_dir("tio-errors");
  EXPECT_THROW(tensor_io::read_container(dir / "missing"), tensor_io::FormatError);
  {
    std::ofstream f(dir / "bad.ambt", std::ios::binary);
    f << "NOPE0000000000";
  }
  EXPECT_THROW(tensor_io::read_container(dir / "bad.ambt"), tensor_io::FormatError);

  tensor_io::write_container(dir / "v.ambt", sample_tensors());
  {
    std::fstream f(dir / "v.ambt", std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(4);
    f.put(9);
  }
  EXPECT_THROW(tensor_io::read_container(dir / "v.ambt"), tensor_io::FormatError);

  tensor_io::write_container(dir / "short.ambt", sample_tensors());
  std::filesystem::resize_file(dir / "short.ambt", std::filesystem::file_size(dir / "short.ambt") - 3);
  EXPECT_THROW(tensor_io::read_container(dir / "short.ambt"), tensor_io::FormatError);

  const std::vector<Tensor> mismatch{{"x", {3}, {1.0f}}};
  EXPECT_THROW(tensor_io::write_container(dir / "m.ambt", mismatch), tensor_io::FormatError);
}

TEST(TensorIo, PayloadCrcDependsOnValuesAndOrder) {
  const auto t = sample_tensors();
  const Tensor* ab[] = {&t[0], &t[1]};
  const Tensor* ba[] = {&t[1], &t[0]};
  EXPECT_NE(tensor_io::payload_crc(ab), tensor_io::payload_crc(ba));
  auto changed = t;
  changed[1].values[0] = 8.0f;
  const Tensor* ab2[] = {&changed[0], &changed[1]};
  EXPECT_NE(tensor_io::payload_crc(ab), tensor_io::payload_crc(ab2));
  EXPECT_EQ(tensor_io::payload_crc(ab), tensor_io::payload_crc(ab));
}

}  // namespace
}  // namespace ambiloc
