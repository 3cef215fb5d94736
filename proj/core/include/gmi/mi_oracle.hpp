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

// Exact mutual information on small discrete joint distributions, used to
// check the decomposition bounds that motivate the objective.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmi/rng.hpp"

namespace gmi {

/// Dense joint distribution over variables with dims[k] categories each.
/// The first variable varies slowest.
struct JointTable {
  std::vector<int> dims;
  std::vector<double> probs;

  size_t num_vars() const { return dims.size(); }
  /// Throws ValidationError unless probs is a distribution over dims.
  void Validate() const;
  size_t Index(std::span<const int> values) const;
  std::vector<int> Values(size_t index) const;
  std::string ToString() const;
};

/// I(A; B) in nats for disjoint variable groups, other variables summed out.
double ExactMi(const JointTable& table, std::span<const int> group_a, std::span<const int> group_b);

/// I(X,Y; Z) >= I(X; Z) - 1e-10.
bool CheckMonotonicity(const JointTable& table, std::span<const int> x, std::span<const int> y,
                       std::span<const int> z);

/// Random positive weights over `dims`, normalized. Entries are at least
/// 1e-6 before normalization; a random exponent skews some tables.
JointTable RandomTable(Rng& rng, std::span<const int> dims);

/// Table with an embedding block h = (h_1..h_n) and features x_1..x_n.
struct MultiplicativeTable {
  JointTable table;
  std::vector<int> h_vars;
  std::vector<int> x_vars;
};

/// p(x) * prod_k q_k(h_k | x_k). `factors[k]` is x_dims[k] rows of
/// h_dims[k] probabilities; `px` runs over the x block, first feature
/// slowest. The conditional p(h | x) is a product of per-feature terms.
MultiplicativeTable BuildMultiplicative(std::span<const int> h_dims, std::span<const int> x_dims,
                                        const std::vector<std::vector<std::vector<double>>>& factors,
                                        std::span<const double> px);

/// Random factors and a random (correlated) feature marginal.
MultiplicativeTable MakeMultiplicative(Rng& rng, std::span<const int> h_dims,
                                       std::span<const int> x_dims);

/// Single h variable with p(h | x) proportional to prod_k r_k(h, x_k),
/// normalized per feature configuration. The per-configuration normalizer
/// generally breaks the product form.
MultiplicativeTable MakeNormalizedProduct(Rng& rng, int h_dim, std::span<const int> x_dims);

/// h = x_1 xor x_2 with uniform binary features.
MultiplicativeTable MakeXorTable();

/// Largest deviation of log p(h | x) from its best additive fit
/// sum_k f_k(h, x_k); zero iff the conditional is a product of per-feature
/// factors. Needs p(x) > 0.
double MultiplicativeResidual(const MultiplicativeTable& t);

struct Decomposition {
  double lower = 0.0;   // sum_j I(h; x_j) / n
  double value = 0.0;   // I(h; X)
  double upper = 0.0;   // sum_j I(h; x_j)
  std::vector<double> locals;
  /// value / upper; absent when upper == 0.
  std::optional<double> weight;
  bool bounds_hold = false;
  bool weight_in_range = false;
  bool ok() const { return bounds_hold && weight_in_range; }
};

constexpr double kOracleTolerance = 1e-10;

Decomposition CheckDecomposition(const MultiplicativeTable& t);

struct OracleSweepConfig {
  int multiplicative_tables = 500;
  int lemma_tables = 1000;
  /// Non-multiplicative tables tried while looking for an upper-bound violation.
  int counterexample_attempts = 2000;
  uint64_t seed = 0;
};

struct OracleProperty {
  std::string name;
  bool passed = true;
  bool skipped = false;
  int checked = 0;
  std::string detail;
  /// Seed reproducing the first failure.
  std::optional<uint64_t> failing_seed;
};

struct OracleSweepResult {
  std::vector<OracleProperty> properties;
  /// Tightest cases seen.
  std::string tightest_upper;
  std::string tightest_lower;
  std::string counterexample;
  bool all_passed() const;
};

/// Per-table seeds are StreamSeed(seed, "<property>-<index>").
OracleSweepResult RunOracleSweep(const OracleSweepConfig& config);

}  // namespace gmi
