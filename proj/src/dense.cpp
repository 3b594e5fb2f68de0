// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/dense.hpp"

#include <cmath>

#include "esrsim/error.hpp"

namespace esrsim {
namespace linalg {

DenseMatrix DenseMatrix::from_csr(const CsrMatrix& a) {
  if (a.n_rows != a.n_cols)
    raise(ErrorCode::shape_mismatch, "from_csr expects a square matrix");
  DenseMatrix d = DenseMatrix::zero(a.n_rows);
  for (std::int64_t r = 0; r < a.n_rows; ++r)
    for (std::int64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k)
      d.at(r, a.col_indices[k]) = a.values[k];
  return d;
}

std::vector<double> cholesky_solve(const DenseMatrix& a,
                                   std::span<const double> w) {
  const std::int64_t n = a.n;
  if (static_cast<std::int64_t>(w.size()) != n)
    raise(ErrorCode::shape_mismatch, "cholesky_solve rhs length");

  // Lower factor, computed column by column.
  DenseMatrix l = DenseMatrix::zero(n);
  for (std::int64_t j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (std::int64_t k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
    if (!(d > 0.0)) raise(ErrorCode::not_spd, "non-positive Cholesky pivot");
    l.at(j, j) = std::sqrt(d);
    for (std::int64_t i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (std::int64_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      l.at(i, j) = s / l.at(j, j);
    }
  }

  // L*u = w, then L^T*y = u.
  std::vector<double> y(w.begin(), w.end());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t k = 0; k < i; ++k) y[i] -= l.at(i, k) * y[k];
    y[i] /= l.at(i, i);
  }
  for (std::int64_t i = n - 1; i >= 0; --i) {
    for (std::int64_t k = i + 1; k < n; ++k) y[i] -= l.at(k, i) * y[k];
    y[i] /= l.at(i, i);
  }
  return y;
}

}  // namespace linalg
}  // namespace esrsim
