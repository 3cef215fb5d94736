// Copyright 2026 The gmi-graph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gmi/binary_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "gmi/error.hpp"

namespace gmi {
namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
T ToLittle(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<uint8_t, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

// Upper bound on any single array, so a corrupt length cannot trigger a huge
// allocation before the read fails.
constexpr uint64_t kMaxElements = uint64_t{1} << 34;

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("cannot open for writing: " + path.string());
}

void BinaryWriter::Put(const void* data, size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void BinaryWriter::WriteHeader(std::string_view magic, uint32_t version) {
  Put(magic.data(), magic.size());
  WriteU32(version);
}

void BinaryWriter::WriteU8(uint8_t v) { Put(&v, 1); }

void BinaryWriter::WriteU32(uint32_t v) {
  v = ToLittle(v);
  Put(&v, sizeof v);
}

void BinaryWriter::WriteU64(uint64_t v) {
  v = ToLittle(v);
  Put(&v, sizeof v);
}

void BinaryWriter::WriteF64(double v) { WriteU64(std::bit_cast<uint64_t>(v)); }

void BinaryWriter::WriteString(std::string_view s) {
  WriteU64(s.size());
  Put(s.data(), s.size());
}

void BinaryWriter::WriteF64Array(std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    Put(values.data(), values.size_bytes());
  } else {
    for (double v : values) WriteF64(v);
  }
}

void BinaryWriter::WriteI32Array(std::span<const int32_t> values) {
  if constexpr (std::endian::native == std::endian::little) {
    Put(values.data(), values.size_bytes());
  } else {
    for (int32_t v : values) WriteI32(v);
  }
}

void BinaryWriter::WriteI64Array(std::span<const int64_t> values) {
  if constexpr (std::endian::native == std::endian::little) {
    Put(values.data(), values.size_bytes());
  } else {
    for (int64_t v : values) WriteI64(v);
  }
}

void BinaryWriter::WriteU8Array(std::span<const uint8_t> values) {
  Put(values.data(), values.size());
}

void BinaryWriter::Close() {
  out_.flush();
  if (!out_) throw Error("write failed: " + path_.string());
  out_.close();
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw Error("cannot open for reading: " + path.string());
}

void BinaryReader::Get(void* data, size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in_.gcount()) != n) {
    throw ParseError("unexpected end of file: " + path_.string());
  }
}

uint32_t BinaryReader::ReadHeader(std::string_view magic) {
  std::string got(magic.size(), '\0');
  Get(got.data(), got.size());
  if (got != magic) {
    throw ParseError(path_.string() + ": bad magic, expected '" + std::string(magic) + "'");
  }
  return ReadU32();
}

uint8_t BinaryReader::ReadU8() {
  uint8_t v;
  Get(&v, 1);
  return v;
}

uint32_t BinaryReader::ReadU32() {
  uint32_t v;
  Get(&v, sizeof v);
  return ToLittle(v);
}

uint64_t BinaryReader::ReadU64() {
  uint64_t v;
  Get(&v, sizeof v);
  return ToLittle(v);
}

double BinaryReader::ReadF64() { return std::bit_cast<double>(ReadU64()); }

std::string BinaryReader::ReadString() {
  const uint64_t n = ReadU64();
  if (n > kMaxElements) throw ParseError(path_.string() + ": corrupt string length");
  std::string s(n, '\0');
  Get(s.data(), n);
  return s;
}

std::vector<double> BinaryReader::ReadF64Array(uint64_t count) {
  if (count > kMaxElements) throw ParseError(path_.string() + ": corrupt array length");
  std::vector<double> v(count);
  Get(v.data(), count * sizeof(double));
  if constexpr (std::endian::native == std::endian::big) {
    for (double& x : v) x = std::bit_cast<double>(ToLittle(std::bit_cast<uint64_t>(x)));
  }
  return v;
}

std::vector<int32_t> BinaryReader::ReadI32Array(uint64_t count) {
  if (count > kMaxElements) throw ParseError(path_.string() + ": corrupt array length");
  std::vector<int32_t> v(count);
  Get(v.data(), count * sizeof(int32_t));
  if constexpr (std::endian::native == std::endian::big) {
    for (int32_t& x : v) x = ToLittle(x);
  }
  return v;
}

std::vector<int64_t> BinaryReader::ReadI64Array(uint64_t count) {
  if (count > kMaxElements) throw ParseError(path_.string() + ": corrupt array length");
  std::vector<int64_t> v(count);
  Get(v.data(), count * sizeof(int64_t));
  if constexpr (std::endian::native == std::endian::big) {
    for (int64_t& x : v) x = ToLittle(x);
  }
  return v;
}

std::vector<uint8_t> BinaryReader::ReadU8Array(uint64_t count) {
  if (count > kMaxElements) throw ParseError(path_.string() + ": corrupt array length");
  std::vector<uint8_t> v(count);
  Get(v.data(), count);
  return v;
}

bool BinaryReader::AtEnd() { return in_.peek() == std::ifstream::traits_type::eof(); }

}  // namespace gmi
