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

#include "ambiloc/tensor_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <numeric>

namespace ambiloc::tensor_io {

namespace {

static_assert(std::endian::native == std::endian::little, "tensor container assumes a little-endian host");

constexpr char kMagic[4] = {'A', 'M', 'B', 'T'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

void write_tensor(std::ostream& os, const Tensor& t) {
  if (t.name.size() > 0xFFFF) throw FormatError("tensor name too long: " + t.name.substr(0, 32));
  if (t.dims.size() > 0xFF) throw FormatError("tensor rank too large: " + t.name);
  if (t.element_count() != t.values.size()) throw FormatError("tensor dims do not match payload: " + t.name);
  put<std::uint16_t>(os, static_cast<std::uint16_t>(t.name.size()));
  os.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
  put<std::uint8_t>(os, static_cast<std::uint8_t>(t.dims.size()));
  for (const auto d : t.dims) put<std::uint32_t>(os, d);
  os.write(reinterpret_cast<const char*>(t.values.data()), static_cast<std::streamsize>(t.values.size() * sizeof(float)));
}

Tensor read_tensor(std::istream& is, const std::string& where) {
  Tensor t;
  std::uint16_t name_len = 0;
  if (!get(is, name_len)) throw FormatError(where + ": truncated tensor header");
  t.name.resize(name_len);
  is.read(t.name.data(), name_len);
  std::uint8_t rank = 0;
  if (!is || !get(is, rank)) throw FormatError(where + ": truncated tensor header");
  t.dims.resize(rank);
  for (auto& d : t.dims) {
    if (!get(is, d)) throw FormatError(where + ": truncated tensor dims");
  }
  t.values.resize(t.element_count());
  is.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(t.values.size() * sizeof(float)));
  if (!is) throw FormatError(where + ": truncated payload of tensor '" + t.name + "'");
  return t;
}

std::uint32_t read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw FormatError(path.string() + ": not an AMBT container");
  std::uint16_t version = 0;
  std::uint32_t count = 0;
  if (!get(is, version) || !get(is, count)) throw FormatError(path.string() + ": truncated header");
  if (version != kFormatVersion) {
    throw FormatError(path.string() + ": unsupported format version " + std::to_string(version));
  }
  return count;
}

}  // namespace

std::size_t Tensor::element_count() const {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t d) { return a * static_cast<std::size_t>(d); });
}

void write_container(const std::filesystem::path& path, std::span<const Tensor> tensors) {
  ContainerWriter w(path);
  for (const auto& t : tensors) w.append(t);
  w.close();
}

std::vector<Tensor> read_container(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  const std::uint32_t count = read_header(is, path);
  std::vector<Tensor> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    out.push_back(read_tensor(is, path.string() + " tensor " + std::to_string(i)));
  }
  return out;
}

ContainerWriter::ContainerWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw FormatError("cannot create " + path.string());
  out_.write(kMagic, 4);
  put<std::uint16_t>(out_, kFormatVersion);
  put<std::uint32_t>(out_, 0);
}

ContainerWriter::~ContainerWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

std::uint64_t ContainerWriter::append(const Tensor& t) {
  if (closed_) throw FormatError("append after close: " + path_.string());
  const auto offset = static_cast<std::uint64_t>(out_.tellp());
  write_tensor(out_, t);
  ++count_;
  return offset;
}

void ContainerWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.seekp(6);
  put<std::uint32_t>(out_, count_);
  out_.close();
  if (!out_) throw FormatError("write failed: " + path_.string());
}

ContainerReader::ContainerReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw FormatError("cannot open " + path.string());
  count_ = read_header(in_, path);
}

Tensor ContainerReader::read_at(std::uint64_t offset) {
  in_.clear();
  in_.seekg(static_cast<std::streamoff>(offset));
  if (!in_) throw FormatError(path_.string() + ": offset " + std::to_string(offset) + " past end of file");
  return read_tensor(in_, path_.string() + " @" + std::to_string(offset));
}

std::uint32_t payload_crc(std::span<const Tensor* const> tensors) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (const Tensor* t : tensors) {
    crc = crc32(crc, reinterpret_cast<const Bytef*>(t->values.data()), static_cast<uInt>(t->values.size() * sizeof(float)));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace ambiloc::tensor_io
