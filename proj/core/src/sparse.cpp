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

#include "gmi/sparse.hpp"

#include <algorithm>
#include <string>

#include "gmi/error.hpp"

namespace gmi {

CsrMatrix CsrMatrix::FromTriplets(int64_t rows, int64_t cols, std::vector<Triplet> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.offsets.assign(static_cast<size_t>(rows) + 1, 0);
  for (size_t k = 0; k < triplets.size(); ++k) {
    const Triplet& t = triplets[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw DimensionError("triplet (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                           ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (!m.columns.empty() && k > 0 && triplets[k - 1].row == t.row &&
        triplets[k - 1].col == t.col) {
      m.values.back() += t.value;
      continue;
    }
    m.columns.push_back(t.col);
    m.values.push_back(t.value);
    ++m.offsets[static_cast<size_t>(t.row) + 1];
  }
  for (int64_t r = 0; r < rows; ++r) m.offsets[r + 1] += m.offsets[r];
  return m;
}

CsrMatrix CsrMatrix::FromDense(const Matrix& dense) {
  CsrMatrix m;
  m.rows = dense.rows();
  m.cols = dense.cols();
  m.offsets.assign(static_cast<size_t>(m.rows) + 1, 0);
  for (int64_t r = 0; r < m.rows; ++r) {
    for (int64_t c = 0; c < m.cols; ++c) {
      const double v = dense(r, c);
      if (v != 0.0) {
        m.columns.push_back(static_cast<NodeId>(c));
        m.values.push_back(v);
      }
    }
    m.offsets[r + 1] = static_cast<int64_t>(m.columns.size());
  }
  return m;
}

CsrMatrix CsrMatrix::Identity(int64_t n) {
  CsrMatrix m;
  m.rows = m.cols = n;
  m.offsets.resize(static_cast<size_t>(n) + 1);
  m.columns.resize(static_cast<size_t>(n));
  m.values.assign(static_cast<size_t>(n), 1.0);
  for (int64_t i = 0; i <= n; ++i) m.offsets[i] = i;
  for (int64_t i = 0; i < n; ++i) m.columns[i] = static_cast<NodeId>(i);
  return m;
}

Matrix CsrMatrix::ToDense() const {
  Matrix d = Matrix::Zero(rows, cols);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t k = offsets[r]; k < offsets[r + 1]; ++k) d(r, columns[k]) = values[k];
  }
  return d;
}

CsrMatrix CsrMatrix::Transposed() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.offsets.assign(static_cast<size_t>(cols) + 1, 0);
  for (NodeId c : columns) ++t.offsets[static_cast<size_t>(c) + 1];
  for (int64_t c = 0; c < cols; ++c) t.offsets[c + 1] += t.offsets[c];
  t.columns.resize(nnz());
  t.values.resize(nnz());
  std::vector<int64_t> cursor(t.offsets.begin(), t.offsets.end() - 1);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      const int64_t dst = cursor[columns[k]]++;
      t.columns[dst] = static_cast<NodeId>(r);
      t.values[dst] = values[k];
    }
  }
  return t;
}

void CsrMatrix::Validate() const {
  if (rows < 0 || cols < 0) throw ValidationError("negative CSR dimensions");
  if (offsets.size() != static_cast<size_t>(rows) + 1) {
    throw ValidationError("CSR offsets length " + std::to_string(offsets.size()) +
                          " != rows + 1 = " + std::to_string(rows + 1));
  }
  if (offsets.front() != 0) throw ValidationError("CSR offsets must start at 0");
  if (offsets.back() != static_cast<int64_t>(columns.size()) || columns.size() != values.size()) {
    throw ValidationError("CSR last offset must equal the number of stored entries");
  }
  for (int64_t r = 0; r < rows; ++r) {
    if (offsets[r + 1] < offsets[r]) throw ValidationError("CSR offsets decrease at row " + std::to_string(r));
    for (int64_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      if (columns[k] < 0 || columns[k] >= cols) {
        throw ValidationError("CSR column out of range in row " + std::to_string(r));
      }
      if (k > offsets[r] && columns[k] <= columns[k - 1]) {
        throw ValidationError("CSR columns not strictly increasing in row " + std::to_string(r));
      }
    }
  }
}

Matrix SparseDenseProduct(const CsrMatrix& s, const Matrix& d) {
  if (s.cols != d.rows()) {
    throw DimensionError("spmm: sparse " + std::to_string(s.rows) + "x" + std::to_string(s.cols) +
                         " times dense " + std::to_string(d.rows()) + "x" + std::to_string(d.cols()));
  }
  Matrix out = Matrix::Zero(s.rows, d.cols());
  for (int64_t r = 0; r < s.rows; ++r) {
    auto row = out.row(r);
    for (int64_t k = s.offsets[r]; k < s.offsets[r + 1]; ++k) {
      row.noalias() += s.values[k] * d.row(s.columns[k]);
    }
  }
  return out;
}

Matrix SparseTransposeDenseProduct(const CsrMatrix& s, const Matrix& d) {
  if (s.rows != d.rows()) {
    throw DimensionError("spmm^T: sparse " + std::to_string(s.rows) + "x" + std::to_string(s.cols) +
                         " transposed times dense " + std::to_string(d.rows()) + "x" +
                         std::to_string(d.cols()));
  }
  Matrix out = Matrix::Zero(s.cols, d.cols());
  for (int64_t r = 0; r < s.rows; ++r) {
    const auto src = d.row(r);
    for (int64_t k = s.offsets[r]; k < s.offsets[r + 1]; ++k) {
      out.row(s.columns[k]).noalias() += s.values[k] * src;
    }
  }
  return out;
}

}  // namespace gmi
