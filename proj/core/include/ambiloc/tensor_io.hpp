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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ambiloc::tensor_io {

// Container layout, all little-endian:
//   "AMBT" | version u16 | tensor count u32 |
//   per tensor: name length u16, UTF-8 name, rank u8, dims u32 x rank,
//               float32 payload.
inline constexpr std::uint16_t kFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t element_count() const;
};

void write_container(const std::filesystem::path& path, std::span<const Tensor> tensors);
std::vector<Tensor> read_container(const std::filesystem::path& path);

/// Appends tensors one at a time; the tensor count in the header is patched
/// on close().
class ContainerWriter {
 public:
  explicit ContainerWriter(const std::filesystem::path& path);
  ~ContainerWriter();
  ContainerWriter(const ContainerWriter&) = delete;
  ContainerWriter& operator=(const ContainerWriter&) = delete;

  /// Returns the byte offset at which the tensor record starts.
  std::uint64_t append(const Tensor& t);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint32_t count_ = 0;
  bool closed_ = false;
};

/// Random access into a container.
class ContainerReader {
 public:
  explicit ContainerReader(const std::filesystem::path& path);

  std::uint32_t tensor_count() const { return count_; }
  /// Reads the tensor record starting at offset; throws FormatError on a
  /// short read or malformed record.
  Tensor read_at(std::uint64_t offset);
  /// Offset just after the header.
  static constexpr std::uint64_t kFirstRecord = 10;

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::uint32_t count_ = 0;
};

/// CRC-32 of the float payloads of the given tensors, in order.
std::uint32_t payload_crc(std::span<const Tensor* const> tensors);

}  // namespace ambiloc::tensor_io
