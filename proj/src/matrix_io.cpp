// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/matrix_io.hpp"

#include <cstdio>
#include <fstream>

#include "esrsim/error.hpp"

namespace esrsim {
namespace linalg {

void write_csr(const std::filesystem::path& path, const CsrMatrix& a) {
  a.validate();
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_failure, "cannot open " + path.string());
  out << "esrsim-csr 1\n" << a.n_rows << ' ' << a.n_cols << ' ' << a.nnz()
      << '\n';
  char buf[40];
  for (std::int64_t r = 0; r < a.n_rows; ++r)
    for (std::int64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", a.values[k]);
      out << r << ' ' << a.col_indices[k] << ' ' << buf << '\n';
    }
  if (!out) raise(ErrorCode::io_failure, "write failed: " + path.string());
}

CsrMatrix read_csr(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_failure, "cannot open " + path.string());
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "esrsim-csr" || version != 1)
    raise(ErrorCode::io_failure, "not an esrsim-csr file: " + path.string());
  CsrMatrix a;
  std::int64_t nnz = 0;
  in >> a.n_rows >> a.n_cols >> nnz;
  if (!in || a.n_rows < 0 || a.n_cols < 0 || nnz < 0)
    raise(ErrorCode::io_failure, "bad matrix header");
  a.row_offsets.assign(a.n_rows + 1, 0);
  a.col_indices.reserve(nnz);
  a.values.reserve(nnz);
  std::int64_t prev_row = -1;
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int64_t r, c;
    double v;
    if (!(in >> r >> c >> v))
      raise(ErrorCode::io_failure, "truncated matrix entries");
    if (r < prev_row)
      raise(ErrorCode::io_failure, "entries must be row-major");
    prev_row = r;
    if (r < 0 || r >= a.n_rows)
      raise(ErrorCode::index_out_of_range, "row out of range");
    ++a.row_offsets[r + 1];
    a.col_indices.push_back(c);
    a.values.push_back(v);
  }
  for (std::int64_t r = 0; r < a.n_rows; ++r)
    a.row_offsets[r + 1] += a.row_offsets[r];
  a.validate();
  return a;
}

}  // namespace linalg
}  // namespace esrsim
