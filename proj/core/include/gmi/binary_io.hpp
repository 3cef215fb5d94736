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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gmi {

// Little-endian binary streams shared by the graph cache, embedding cache and
// checkpoint formats. Every file starts with a 4-byte magic and a u32 version.

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  void WriteHeader(std::string_view magic, uint32_t version);
  void WriteU8(uint8_t v);
  void WriteU32(uint32_t v);
  void WriteU64(uint64_t v);
  void WriteI32(int32_t v) { WriteU32(static_cast<uint32_t>(v)); }
  void WriteI64(int64_t v) { WriteU64(static_cast<uint64_t>(v)); }
  void WriteF64(double v);
  void WriteString(std::string_view s);
  void WriteF64Array(std::span<const double> values);
  void WriteI32Array(std::span<const int32_t> values);
  void WriteI64Array(std::span<const int64_t> values);
  void WriteU8Array(std::span<const uint8_t> values);

  /// Flushes and reports any write failure.
  void Close();

 private:
  void Put(const void* data, size_t n);

  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  /// Returns the version; throws ParseError on a magic mismatch.
  uint32_t ReadHeader(std::string_view magic);
  uint8_t ReadU8();
  uint32_t ReadU32();
  uint64_t ReadU64();
  int32_t ReadI32() { return static_cast<int32_t>(ReadU32()); }
  int64_t ReadI64() { return static_cast<int64_t>(ReadU64()); }
  double ReadF64();
  std::string ReadString();
  std::vector<double> ReadF64Array(uint64_t count);
  std::vector<int32_t> ReadI32Array(uint64_t count);
  std::vector<int64_t> ReadI64Array(uint64_t count);
  std::vector<uint8_t> ReadU8Array(uint64_t count);

  bool AtEnd();

 private:
  void Get(void* data, size_t n);

  std::filesystem::path path_;
  std::ifstream in_;
};

}  // namespace gmi
