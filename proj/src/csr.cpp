// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/csr.hpp"

#include <algorithm>
#include <string>

#include "esrsim/error.hpp"

namespace esrsim {
namespace linalg {

double CsrMatrix::at(std::int64_t row, std::int64_t col) const {
  if (row < 0 || row >= n_rows || col < 0 || col >= n_cols)
    raise(ErrorCode::index_out_of_range, "CsrMatrix::at");
  const auto* cb = col_indices.data() + row_offsets[row];
  const auto* ce = col_indices.data() + row_offsets[row + 1];
  const auto* it = std::lower_bound(cb, ce, col);
  if (it == ce || *it != col) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.data())];
}

void CsrMatrix::validate() const {
  if (n_rows < 0 || n_cols < 0)
    raise(ErrorCode::shape_mismatch, "negative dimensions");
  if (row_offsets.size() != static_cast<std::size_t>(n_rows) + 1)
    raise(ErrorCode::shape_mismatch, "row_offsets length");
  if (row_offsets.front() != 0)
    raise(ErrorCode::shape_mismatch, "row_offsets[0] != 0");
  if (col_indices.size() != values.size())
    raise(ErrorCode::shape_mismatch, "col_indices/values length mismatch");
  if (row_offsets.back() != nnz())
    raise(ErrorCode::shape_mismatch, "row_offsets[n_rows] != nnz");
  for (std::int64_t r = 0; r < n_rows; ++r) {
    if (row_offsets[r] > row_offsets[r + 1])
      raise(ErrorCode::shape_mismatch, "row_offsets not monotone");
    for (std::int64_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k) {
      if (col_indices[k] < 0 || col_indices[k] >= n_cols)
        raise(ErrorCode::index_out_of_range,
              "column index out of range in row " + std::to_string(r));
      if (k > row_offsets[r] && col_indices[k - 1] >= col_indices[k])
        raise(ErrorCode::shape_mismatch,
              "column indices not strictly increasing in row " +
                  std::to_string(r));
    }
  }
}

bool CsrMatrix::is_symmetric() const {
  if (n_rows != n_cols) return false;
  for (std::int64_t r = 0; r < n_rows; ++r)
    for (std::int64_t k = row_offsets[r]; k < row_offsets[r + 1]; ++k)
      if (at(col_indices[k], r) != values[k]) return false;
  return true;
}

bool CsrMatrix::has_positive_diagonal() const {
  if (n_rows != n_cols) return false;
  for (std::int64_t r = 0; r < n_rows; ++r)
    if (!(at(r, r) > 0.0)) return false;
  return true;
}

CsrMatrix CsrMatrix::identity(std::int64_t n) {
  CsrMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.resize(n + 1);
  m.col_indices.resize(n);
  m.values.assign(n, 1.0);
  for (std::int64_t i = 0; i <= n; ++i) m.row_offsets[i] = i;
  for (std::int64_t i = 0; i < n; ++i) m.col_indices[i] = i;
  return m;
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> v) {
  if (static_cast<std::int64_t>(v.size()) != a.n_cols)
    raise(ErrorCode::shape_mismatch, "spmv vector length != n_cols");
  std::vector<double> y(a.n_rows);
  for (std::int64_t r = 0; r < a.n_rows; ++r)
    y[r] = spmv_row(a, r, [&](std::int64_t c) { return v[c]; });
  return y;
}

namespace {

bool strictly_increasing_in_range(std::span<const std::int64_t> idx,
                                  std::int64_t bound) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= bound) return false;
    if (i > 0 && idx[i - 1] >= idx[i]) return false;
  }
  return true;
}

}  // namespace

CsrMatrix submatrix(const CsrMatrix& a, std::span<const std::int64_t> rows,
                    std::span<const std::int64_t> cols) {
  if (!strictly_increasing_in_range(rows, a.n_rows) ||
      !strictly_increasing_in_range(cols, a.n_cols))
    raise(ErrorCode::index_out_of_range, "submatrix index selection");

  // Global column -> position in the extracted set; -1 when dropped.
  std::vector<std::int64_t> col_map(a.n_cols, -1);
  for (std::size_t j = 0; j < cols.size(); ++j) col_map[cols[j]] = j;

  CsrMatrix s;
  s.n_rows = static_cast<std::int64_t>(rows.size());
  s.n_cols = static_cast<std::int64_t>(cols.size());
  s.row_offsets.reserve(rows.size() + 1);
  s.row_offsets.push_back(0);
  for (std::int64_t r : rows) {
    for (std::int64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const std::int64_t m = col_map[a.col_indices[k]];
      if (m >= 0) {
        s.col_indices.push_back(m);
        s.values.push_back(a.values[k]);
      }
    }
    s.row_offsets.push_back(s.nnz());
  }
  return s;
}

CsrMatrix submatrix(const CsrMatrix& a, std::int64_t row_begin,
                    std::int64_t row_end, std::span<const std::int64_t> cols) {
  if (row_begin < 0 || row_end < row_begin || row_end > a.n_rows)
    raise(ErrorCode::index_out_of_range, "submatrix row range");
  std::vector<std::int64_t> rows(row_end - row_begin);
  for (std::int64_t i = row_begin; i < row_end; ++i) rows[i - row_begin] = i;
  return submatrix(a, rows, cols);
}

}  // namespace linalg
}  // namespace esrsim
