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

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace gmi {

using Rng = std::mt19937_64;

uint64_t SplitMix64(uint64_t x);

/// Derives an independent seed for a named stream of a root seed.
uint64_t StreamSeed(uint64_t root_seed, std::string_view stream);

/// All randomness of a run flows from one root seed. Each consumer draws from
/// its own named stream ("init", "negatives", "edge-removal", "eval"), so
/// changing how much one consumer draws never perturbs another.
class SeedStreams {
 public:
  explicit SeedStreams(uint64_t root_seed) : root_(root_seed) {}

  uint64_t root() const { return root_; }
  uint64_t Seed(std::string_view stream) const { return StreamSeed(root_, stream); }
  Rng Stream(std::string_view stream) const { return Rng(Seed(stream)); }

 private:
  uint64_t root_;
};

// The helpers below avoid the implementation-defined std:: distributions so
// sampled values do not depend on the standard library in use.

/// Uniform double in [0, 1) with 53 random bits.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double UniformReal(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

/// Uniform integer in [0, n); n must be positive.
uint64_t UniformIndex(Rng& rng, uint64_t n);

template <typename T>
void Shuffle(std::span<T> values, Rng& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    const size_t j = UniformIndex(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

std::string SerializeRng(const Rng& rng);
Rng DeserializeRng(const std::string& state);

}  // namespace gmi
