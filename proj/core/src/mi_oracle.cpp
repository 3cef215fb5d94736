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

#include "gmi/mi_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "gmi/error.hpp"

namespace gmi {
namespace {

constexpr double kProbabilityFloor = 1e-6;

size_t Product(std::span<const int> dims) {
  size_t n = 1;
  for (int d : dims) n *= static_cast<size_t>(d);
  return n;
}

void CheckGroups(const JointTable& t, std::span<const int> a, std::span<const int> b) {
  if (a.empty() || b.empty()) throw ValidationError("mutual information needs two non-empty groups");
  std::vector<bool> used(t.num_vars(), false);
  for (auto group : {a, b}) {
    for (int v : group) {
      if (v < 0 || static_cast<size_t>(v) >= t.num_vars()) {
        throw ValidationError("variable " + std::to_string(v) + " out of range");
      }
      if (used[static_cast<size_t>(v)]) throw ValidationError("variable groups overlap");
      used[static_cast<size_t>(v)] = true;
    }
  }
}

size_t GroupIndex(const std::vector<int>& values, const std::vector<int>& dims,
                  std::span<const int> group) {
  size_t index = 0;
  for (int v : group) {
    index = index * static_cast<size_t>(dims[static_cast<size_t>(v)]) +
            static_cast<size_t>(values[static_cast<size_t>(v)]);
  }
  return index;
}

size_t GroupSize(const std::vector<int>& dims, std::span<const int> group) {
  size_t n = 1;
  for (int v : group) n *= static_cast<size_t>(dims[static_cast<size_t>(v)]);
  return n;
}

/// Positive weights with a random skew, normalized.
std::vector<double> RandomDistribution(Rng& rng, size_t n) {
  static constexpr double kSkews[] = {1.0, 2.0, 4.0, 8.0};
  const double skew = kSkews[UniformIndex(rng, 4)];
  std::vector<double> p(n);
  for (double& v : p) v = std::pow(Uniform01(rng), skew) + kProbabilityFloor;
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return p;
}

std::vector<int> RandomDims(Rng& rng, size_t count) {
  std::vector<int> dims(count);
  for (int& d : dims) d = 2 + static_cast<int>(UniformIndex(rng, 2));
  return dims;
}

std::string Sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

OracleProperty Named(std::string name) {
  OracleProperty p;
  p.name = std::move(name);
  return p;
}

std::vector<int> Range(int begin, int end) {
  std::vector<int> out(static_cast<size_t>(end - begin));
  std::iota(out.begin(), out.end(), begin);
  return out;
}

}  // namespace

void JointTable::Validate() const {
  if (dims.empty()) throw ValidationError("joint table has no variables");
  for (int d : dims) {
    if (d < 1) throw ValidationError("joint table dimension must be >= 1");
  }
  if (probs.size() != Product(dims)) {
    throw ValidationError("joint table has " + std::to_string(probs.size()) + " entries, dims need " +
                          std::to_string(Product(dims)));
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("joint table entry is negative or not finite");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("joint table sums to " + std::to_string(total));
  }
}

size_t JointTable::Index(std::span<const int> values) const {
  if (values.size() != dims.size()) throw DimensionError("wrong number of variable values");
  size_t index = 0;
  for (size_t k = 0; k < dims.size(); ++k) {
    if (values[k] < 0 || values[k] >= dims[k]) throw DimensionError("variable value out of range");
    index = index * static_cast<size_t>(dims[k]) + static_cast<size_t>(values[k]);
  }
  return index;
}

std::vector<int> JointTable::Values(size_t index) const {
  std::vector<int> values(dims.size());
  for (size_t k = dims.size(); k-- > 0;) {
    values[k] = static_cast<int>(index % static_cast<size_t>(dims[k]));
    index /= static_cast<size_t>(dims[k]);
  }
  return values;
}

std::string JointTable::ToString() const {
  std::ostringstream out;
  out.precision(17);
  out << "dims=[";
  for (size_t k = 0; k < dims.size(); ++k) out << (k ? "," : "") << dims[k];
  out << "] probs=[";
  for (size_t k = 0; k < probs.size(); ++k) out << (k ? "," : "") << probs[k];
  out << "]";
  return out.str();
}

double ExactMi(const JointTable& table, std::span<const int> group_a, std::span<const int> group_b) {
  CheckGroups(table, group_a, group_b);
  const size_t na = GroupSize(table.dims, group_a);
  const size_t nb = GroupSize(table.dims, group_b);
  std::vector<double> pab(na * nb, 0.0), pa(na, 0.0), pb(nb, 0.0);
  for (size_t i = 0; i < table.probs.size(); ++i) {
    const std::vector<int> values = table.Values(i);
    const size_t a = GroupIndex(values, table.dims, group_a);
    const size_t b = GroupIndex(values, table.dims, group_b);
    pab[a * nb + b] += table.probs[i];
    pa[a] += table.probs[i];
    pb[b] += table.probs[i];
  }
  double mi = 0.0;
  for (size_t a = 0; a < na; ++a) {
    for (size_t b = 0; b < nb; ++b) {
      const double p = pab[a * nb + b];
      if (p > 0.0) mi += p * std::log(p / (pa[a] * pb[b]));
    }
  }
  // Rounding can leave -1e-17 for independent groups.
  return std::max(mi, 0.0);
}

bool CheckMonotonicity(const JointTable& table, std::span<const int> x, std::span<const int> y,
                       std::span<const int> z) {
  std::vector<int> xy(x.begin(), x.end());
  xy.insert(xy.end(), y.begin(), y.end());
  return ExactMi(table, xy, z) >= ExactMi(table, x, z) - kOracleTolerance;
}

JointTable RandomTable(Rng& rng, std::span<const int> dims) {
  JointTable t;
  t.dims.assign(dims.begin(), dims.end());
  t.probs = RandomDistribution(rng, Product(dims));
  t.Validate();
  return t;
}

MultiplicativeTable BuildMultiplicative(std::span<const int> h_dims, std::span<const int> x_dims,
                                        const std::vector<std::vector<std::vector<double>>>& factors,
                                        std::span<const double> px) {
  const size_t n = x_dims.size();
  if (n == 0 || h_dims.size() != n || factors.size() != n) {
    throw DimensionError("multiplicative table needs one h variable and one factor per feature");
  }
  if (px.size() != Product(x_dims)) throw DimensionError("feature marginal has the wrong size");
  for (size_t k = 0; k < n; ++k) {
    if (factors[k].size() != static_cast<size_t>(x_dims[k])) throw DimensionError("factor row count");
    for (const auto& row : factors[k]) {
      if (row.size() != static_cast<size_t>(h_dims[k])) throw DimensionError("factor row width");
    }
  }
  MultiplicativeTable out;
  out.table.dims.assign(h_dims.begin(), h_dims.end());
  out.table.dims.insert(out.table.dims.end(), x_dims.begin(), x_dims.end());
  out.h_vars = Range(0, static_cast<int>(n));
  out.x_vars = Range(static_cast<int>(n), static_cast<int>(2 * n));
  out.table.probs.resize(Product(out.table.dims));
  const size_t nx = px.size();
  for (size_t i = 0; i < out.table.probs.size(); ++i) {
    const std::vector<int> v = out.table.Values(i);
    double p = px[i % nx];
    for (size_t k = 0; k < n; ++k) p *= factors[k][static_cast<size_t>(v[n + k])][static_cast<size_t>(v[k])];
    out.table.probs[i] = p;
  }
  // Renormalize away rounding in the factor rows.
  const double total = std::accumulate(out.table.probs.begin(), out.table.probs.end(), 0.0);
  for (double& p : out.table.probs) p /= total;
  out.table.Validate();
  return out;
}

MultiplicativeTable MakeMultiplicative(Rng& rng, std::span<const int> h_dims,
                                       std::span<const int> x_dims) {
  std::vector<std::vector<std::vector<double>>> factors(x_dims.size());
  for (size_t k = 0; k < x_dims.size(); ++k) {
    for (int xv = 0; xv < x_dims[k]; ++xv) {
      factors[k].push_back(RandomDistribution(rng, static_cast<size_t>(h_dims[k])));
    }
  }
  const std::vector<double> px = RandomDistribution(rng, Product(x_dims));
  return BuildMultiplicative(h_dims, x_dims, factors, px);
}

MultiplicativeTable MakeNormalizedProduct(Rng& rng, int h_dim, std::span<const int> x_dims) {
  const size_t n = x_dims.size();
  if (n == 0 || h_dim < 1) throw DimensionError("normalized product needs h and features");
  std::vector<std::vector<std::vector<double>>> r(n);  // r[k][x_k][h]
  for (size_t k = 0; k < n; ++k) {
    for (int xv = 0; xv < x_dims[k]; ++xv) {
      r[k].push_back(RandomDistribution(rng, static_cast<size_t>(h_dim)));
    }
  }
  const std::vector<double> px = RandomDistribution(rng, Product(x_dims));
  MultiplicativeTable out;
  out.table.dims.push_back(h_dim);
  out.table.dims.insert(out.table.dims.end(), x_dims.begin(), x_dims.end());
  out.h_vars = {0};
  out.x_vars = Range(1, static_cast<int>(n) + 1);
  const size_t nx = px.size();
  out.table.probs.assign(static_cast<size_t>(h_dim) * nx, 0.0);
  for (size_t xi = 0; xi < nx; ++xi) {
    std::vector<double> cond(static_cast<size_t>(h_dim), 1.0);
    const std::vector<int> v = out.table.Values(xi);  // h = 0, so v[1..] is x
    for (int h = 0; h < h_dim; ++h) {
      for (size_t k = 0; k < n; ++k) cond[h] *= r[k][static_cast<size_t>(v[k + 1])][h];
    }
    const double z = std::accumulate(cond.begin(), cond.end(), 0.0);
    for (int h = 0; h < h_dim; ++h) out.table.probs[h * nx + xi] = px[xi] * cond[h] / z;
  }
  const double total = std::accumulate(out.table.probs.begin(), out.table.probs.end(), 0.0);
  for (double& p : out.table.probs) p /= total;
  out.table.Validate();
  return out;
}

MultiplicativeTable MakeXorTable() {
  MultiplicativeTable out;
  out.table.dims = {2, 2, 2};
  out.h_vars = {0};
  out.x_vars = {1, 2};
  out.table.probs.assign(8, 0.0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int v[] = {a ^ b, a, b};
      out.table.probs[out.table.Index(v)] = 0.25;
    }
  }
  return out;
}

double MultiplicativeResidual(const MultiplicativeTable& t) {
  const auto& dims = t.table.dims;
  const size_t nh = GroupSize(dims, t.h_vars);
  std::vector<int> x_dims;
  for (int v : t.x_vars) x_dims.push_back(dims[static_cast<size_t>(v)]);
  const size_t nx = Product(x_dims);
  // log p(h | x) on the (h, x) grid.
  std::vector<double> px(nx, 0.0), g(nh * nx, 0.0);
  std::vector<double> pjoint(nh * nx, 0.0);
  for (size_t i = 0; i < t.table.probs.size(); ++i) {
    const std::vector<int> values = t.table.Values(i);
    const size_t h = GroupIndex(values, dims, t.h_vars);
    const size_t x = GroupIndex(values, dims, t.x_vars);
    pjoint[h * nx + x] += t.table.probs[i];
    px[x] += t.table.probs[i];
  }
  for (size_t x = 0; x < nx; ++x) {
    if (!(px[x] > 0.0)) throw DomainError("multiplicative residual needs p(x) > 0");
  }
  for (size_t k = 0; k < pjoint.size(); ++k) {
    if (!(pjoint[k] > 0.0)) return std::numeric_limits<double>::infinity();
    g[k] = std::log(pjoint[k] / px[k % nx]);
  }
  // For each h, project g(h, .) onto additive functions of x: the sum of
  // main effects minus (n - 1) times the grand mean reproduces any additive
  // function exactly on a full grid.
  const size_t n = x_dims.size();
  std::vector<int> xv(n);
  double worst = 0.0;
  for (size_t h = 0; h < nh; ++h) {
    const double* row = g.data() + h * nx;
    const double grand = std::accumulate(row, row + nx, 0.0) / static_cast<double>(nx);
    std::vector<std::vector<double>> main(n);
    for (size_t k = 0; k < n; ++k) main[k].assign(static_cast<size_t>(x_dims[k]), 0.0);
    for (size_t x = 0; x < nx; ++x) {
      size_t rest = x;
      for (size_t k = n; k-- > 0;) {
        xv[k] = static_cast<int>(rest % static_cast<size_t>(x_dims[k]));
        rest /= static_cast<size_t>(x_dims[k]);
      }
      for (size_t k = 0; k < n; ++k) {
        main[k][static_cast<size_t>(xv[k])] += row[x] * x_dims[k] / static_cast<double>(nx);
      }
    }
    for (size_t x = 0; x < nx; ++x) {
      size_t rest = x;
      for (size_t k = n; k-- > 0;) {
        xv[k] = static_cast<int>(rest % static_cast<size_t>(x_dims[k]));
        rest /= static_cast<size_t>(x_dims[k]);
      }
      double fit = -static_cast<double>(n - 1) * grand;
      for (size_t k = 0; k < n; ++k) fit += main[k][static_cast<size_t>(xv[k])];
      worst = std::max(worst, std::abs(row[x] - fit));
    }
  }
  return worst;
}

Decomposition CheckDecomposition(const MultiplicativeTable& t) {
  t.table.Validate();
  Decomposition d;
  d.value = ExactMi(t.table, t.h_vars, t.x_vars);
  for (int x : t.x_vars) {
    const int group[] = {x};
    d.locals.push_back(ExactMi(t.table, t.h_vars, group));
  }
  const double n = static_cast<double>(t.x_vars.size());
  d.upper = std::accumulate(d.locals.begin(), d.locals.end(), 0.0);
  d.lower = d.upper / n;
  d.bounds_hold = d.lower - kOracleTolerance <= d.value && d.value <= d.upper + kOracleTolerance;
  if (d.upper > kOracleTolerance) {
    d.weight = d.value / d.upper;
    d.weight_in_range = *d.weight >= 1.0 / n - kOracleTolerance && *d.weight <= 1.0 + kOracleTolerance;
  } else {
    // All local terms vanish; the upper bound then forces value ~ 0.
    d.weight_in_range = true;
  }
  return d;
}

bool OracleSweepResult::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const OracleProperty& p) { return p.passed; });
}

OracleSweepResult RunOracleSweep(const OracleSweepConfig& config) {
  OracleSweepResult result;
  auto seed_for = [&](const std::string& property, int index) {
    return StreamSeed(config.seed, property + "-" + std::to_string(index));
  };
  auto fail = [](OracleProperty& p, uint64_t seed, std::string detail) {
    if (!p.passed) return;
    p.passed = false;
    p.failing_seed = seed;
    p.detail = std::move(detail);
  };

  // Unconditional properties on arbitrary tables.
  OracleProperty symmetry = Named("mi-symmetry");
  OracleProperty nonneg = Named("mi-nonnegative");
  OracleProperty lemma = Named("lemma-monotonicity");
  for (int i = 0; i < config.lemma_tables; ++i) {
    const uint64_t seed = seed_for("lemma", i);
    Rng rng(seed);
    const size_t vars = 3 + UniformIndex(rng, 2);
    const JointTable t = RandomTable(rng, RandomDims(rng, vars));
    std::vector<int> order = Range(0, static_cast<int>(vars));
    Shuffle(std::span<int>(order), rng);
    const std::span<const int> x(order.data(), 1);
    const std::span<const int> y(order.data() + 1, vars - 2);
    const std::span<const int> z(order.data() + vars - 1, 1);
    const double ab = ExactMi(t, x, z), ba = ExactMi(t, z, x);
    if (std::abs(ab - ba) > 1e-12) fail(symmetry, seed, "I(a;b) != I(b;a)");
    if (ab < 0.0) fail(nonneg, seed, "negative MI");
    if (!CheckMonotonicity(t, x, y, z)) fail(lemma, seed, "I(X,Y;Z) < I(X;Z): " + t.ToString());
    ++symmetry.checked;
    ++nonneg.checked;
    ++lemma.checked;
  }
  for (OracleProperty* p : {&symmetry, &nonneg, &lemma}) {
    if (config.lemma_tables == 0) {
      p->skipped = true;
      p->detail = "no tables requested";
    }
    result.properties.push_back(*p);
  }

  // Decomposition bounds on multiplicative tables.
  OracleProperty product = Named("multiplicative-construction");
  OracleProperty sandwich = Named("decomposition-bounds");
  OracleProperty weight = Named("decomposition-weight");
  double tightest_upper = std::numeric_limits<double>::infinity();
  double tightest_lower = std::numeric_limits<double>::infinity();
  for (int i = 0; i < config.multiplicative_tables; ++i) {
    const uint64_t seed = seed_for("decomposition", i);
    Rng rng(seed);
    const size_t n = 2 + UniformIndex(rng, 2);
    const std::vector<int> h_dims = RandomDims(rng, n);
    const std::vector<int> x_dims = RandomDims(rng, n);
    const MultiplicativeTable t = MakeMultiplicative(rng, h_dims, x_dims);
    const double residual = MultiplicativeResidual(t);
    if (!(residual < 1e-8)) fail(product, seed, "residual " + Sci(residual));
    const Decomposition d = CheckDecomposition(t);
    if (!d.bounds_hold) fail(sandwich, seed, "bounds violated: " + t.table.ToString());
    if (!d.weight_in_range) fail(weight, seed, "weight out of [1/n, 1]: " + t.table.ToString());
    if (d.upper - d.value < tightest_upper) {
      tightest_upper = d.upper - d.value;
      result.tightest_upper = "seed " + std::to_string(seed) + " slack " +
                              Sci(tightest_upper) + " " + t.table.ToString();
    }
    if (d.value - d.lower < tightest_lower) {
      tightest_lower = d.value - d.lower;
      result.tightest_lower = "seed " + std::to_string(seed) + " slack " +
                              Sci(tightest_lower) + " " + t.table.ToString();
    }
    ++product.checked;
    ++sandwich.checked;
    ++weight.checked;
  }

  // The upper bound must fail somewhere once the product form is dropped.
  OracleProperty counter = Named("non-multiplicative-counterexample");
  if (config.multiplicative_tables > 0) {
    const MultiplicativeTable xor_table = MakeXorTable();
    bool found = false;
    if (CheckDecomposition(xor_table).value > CheckDecomposition(xor_table).upper + kOracleTolerance) {
      found = true;
      result.counterexample = "xor " + xor_table.table.ToString();
    }
    int normalized_hits = 0;
    for (int i = 0; i < config.counterexample_attempts; ++i) {
      const uint64_t seed = seed_for("counterexample", i);
      Rng rng(seed);
      const size_t n = 2 + UniformIndex(rng, 2);
      const int h_dim = 2 + static_cast<int>(UniformIndex(rng, 2));
      const MultiplicativeTable t = MakeNormalizedProduct(rng, h_dim, RandomDims(rng, n));
      ++counter.checked;
      const Decomposition d = CheckDecomposition(t);
      if (d.value > d.upper + kOracleTolerance) {
        ++normalized_hits;
        if (MultiplicativeResidual(t) < 1e-8) {
          fail(counter, seed, "upper bound violated by a product-form table: " + t.table.ToString());
        }
        if (!found) {
          found = true;
          result.counterexample = "seed " + std::to_string(seed) + " " + t.table.ToString();
        }
      }
    }
    if (!found) fail(counter, config.seed, "no upper-bound violation found");
    if (counter.passed) {
      counter.detail = "xor violates the upper bound; " + std::to_string(normalized_hits) + " of " +
                       std::to_string(config.counterexample_attempts) +
                       " normalized-product tables violate it";
    }
  }
  for (OracleProperty* p : {&product, &sandwich, &weight, &counter}) {
    if (config.multiplicative_tables == 0) {
      p->skipped = true;
      p->detail = "no tables requested";
    }
    result.properties.push_back(*p);
  }
  return result;
}

}  // namespace gmi
