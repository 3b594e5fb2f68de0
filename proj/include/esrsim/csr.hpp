// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace esrsim {
namespace linalg {

/// Sparse matrix in compressed-sparse-row form. Column indices are
/// strictly increasing within each row; SPD inputs additionally carry a
/// full, positive diagonal and a symmetric pattern.
struct CsrMatrix {
  std::int64_t n_rows = 0;
  std::int64_t n_cols = 0;
  std::vector<std::int64_t> row_offsets;  // length n_rows + 1
  std::vector<std::int64_t> col_indices;
  std::vector<double> values;

  std::int64_t nnz() const { return static_cast<std::int64_t>(values.size()); }

  double at(std::int64_t row, std::int64_t col) const;

  /// Structural invariants (offsets monotone, columns sorted and in
  /// range). Throws on violation.
  void validate() const;

  bool is_symmetric() const;
  bool has_positive_diagonal() const;

  static CsrMatrix identity(std::int64_t n);
};

/// y = A * v with fixed left-to-right accumulation per row.
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> v);

/// Per-row kernel shared by spmv and the augmented variant: accumulates
/// row `row` of A against an arbitrary entry accessor, in storage order.
template <typename Lookup>
double spmv_row(const CsrMatrix& a, std::int64_t row, Lookup&& value_at) {
  double acc = 0.0;
  for (std::int64_t k = a.row_offsets[row]; k < a.row_offsets[row + 1]; ++k)
    acc += a.values[k] * value_at(a.col_indices[k]);
  return acc;
}

/// Extraction of rows x cols with column reindexing into the extracted
/// set. Both index lists must be strictly increasing and in range.
CsrMatrix submatrix(const CsrMatrix& a, std::span<const std::int64_t> rows,
                    std::span<const std::int64_t> cols);

/// Contiguous-row convenience form: rows [row_begin, row_end).
CsrMatrix submatrix(const CsrMatrix& a, std::int64_t row_begin,
                    std::int64_t row_end, std::span<const std::int64_t> cols);

/// Row-block partition of [0, n) into `proc` contiguous balanced blocks
/// (sizes differ by at most one; larger blocks first).
struct Partition {
  std::int64_t n = 0;
  int proc = 1;

  std::int64_t block_begin(int rank) const {
    const std::int64_t q = n / proc, r = n % proc;
    return rank < r ? rank * (q + 1) : r * (q + 1) + (rank - r) * q;
  }
  std::int64_t block_end(int rank) const { return block_begin(rank + 1); }
  std::int64_t block_size(int rank) const {
    return block_end(rank) - block_begin(rank);
  }
  /// Rank owning global index i.
  int owner(std::int64_t i) const {
    const std::int64_t q = n / proc, r = n % proc;
    const std::int64_t split = r * (q + 1);
    if (i < split) return static_cast<int>(i / (q + 1));
    return static_cast<int>(r + (i - split) / q);
  }
};

}  // namespace linalg
}  // namespace esrsim
