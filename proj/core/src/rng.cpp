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

#include "gmi/rng.hpp"

#include <sstream>

#include "gmi/error.hpp"

namespace gmi {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t StreamSeed(uint64_t root_seed, std::string_view stream) {
  // FNV-1a over the stream name, mixed with the root.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(root_seed) ^ h);
}

uint64_t UniformIndex(Rng& rng, uint64_t n) {
  if (n == 0) throw DomainError("UniformIndex: empty range");
  // Rejection keeps the draw exactly uniform.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

std::string SerializeRng(const Rng& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

Rng DeserializeRng(const std::string& state) {
  Rng rng;
  std::istringstream is(state);
  is >> rng;
  if (!is) throw ParseError("corrupt RNG state");
  return rng;
}

}  // namespace gmi
