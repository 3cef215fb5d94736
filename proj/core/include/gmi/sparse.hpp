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

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace gmi {

/// Dense row-major matrix of doubles; the storage type of every tensor.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using NodeId = int32_t;

struct Triplet {
  NodeId row;
  NodeId col;
  double value;
};

/// Compressed sparse row matrix. Column indices within a row are strictly
/// increasing; offsets has rows + 1 entries and ends at nnz.
struct CsrMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<int64_t> offsets{0};
  std::vector<NodeId> columns;
  std::vector<double> values;

  size_t nnz() const { return columns.size(); }

  std::span<const NodeId> RowColumns(int64_t r) const {
    return {columns.data() + offsets[r], static_cast<size_t>(offsets[r + 1] - offsets[r])};
  }
  std::span<const double> RowValues(int64_t r) const {
    return {values.data() + offsets[r], static_cast<size_t>(offsets[r + 1] - offsets[r])};
  }

  /// Builds from unordered triplets; duplicate coordinates are summed.
  static CsrMatrix FromTriplets(int64_t rows, int64_t cols, std::vector<Triplet> triplets);
  /// Keeps entries with |value| > 0.
  static CsrMatrix FromDense(const Matrix& dense);
  static CsrMatrix Identity(int64_t n);

  Matrix ToDense() const;
  CsrMatrix Transposed() const;

  /// Throws ValidationError when the structural invariants do not hold.
  void Validate() const;

  bool operator==(const CsrMatrix&) const = default;
};

/// out = s * d.
Matrix SparseDenseProduct(const CsrMatrix& s, const Matrix& d);
/// out = s^T * d without materializing the transpose.
Matrix SparseTransposeDenseProduct(const CsrMatrix& s, const Matrix& d);

}  // namespace gmi
