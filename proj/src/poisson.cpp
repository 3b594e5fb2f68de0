// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/poisson.hpp"

#include "esrsim/error.hpp"

namespace esrsim {
namespace linalg {

namespace {
// Desk-scale guard; keeps n and nnz inside comfortable vector sizes.
constexpr std::int64_t kMaxCells = 1ll << 27;
}  // namespace

CsrMatrix gen_poisson_7pt(std::int64_t nx, std::int64_t ny, std::int64_t nz) {
  if (nx < 1 || ny < 1 || nz < 1)
    raise(ErrorCode::invalid_config, "grid dimensions must be >= 1");
  if (nx > kMaxCells || ny > kMaxCells || nz > kMaxCells ||
      nx * ny > kMaxCells / nz || nx * ny * nz > kMaxCells)
    raise(ErrorCode::size_overflow, "grid too large");

  const std::int64_t n = nx * ny * nz;
  CsrMatrix a;
  a.n_rows = a.n_cols = n;
  a.row_offsets.reserve(n + 1);
  a.row_offsets.push_back(0);
  a.col_indices.reserve(7 * n);
  a.values.reserve(7 * n);

  auto flat = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
    return x + nx * (y + ny * z);
  };

  for (std::int64_t z = 0; z < nz; ++z)
    for (std::int64_t y = 0; y < ny; ++y)
      for (std::int64_t x = 0; x < nx; ++x) {
        const std::int64_t i = flat(x, y, z);
        // Columns emitted in increasing order: -z, -y, -x, diag, +x, +y, +z.
        if (z > 0) { a.col_indices.push_back(flat(x, y, z - 1)); a.values.push_back(-1.0); }
        if (y > 0) { a.col_indices.push_back(flat(x, y - 1, z)); a.values.push_back(-1.0); }
        if (x > 0) { a.col_indices.push_back(i - 1); a.values.push_back(-1.0); }
        a.col_indices.push_back(i);
        a.values.push_back(6.0);
        if (x + 1 < nx) { a.col_indices.push_back(i + 1); a.values.push_back(-1.0); }
        if (y + 1 < ny) { a.col_indices.push_back(flat(x, y + 1, z)); a.values.push_back(-1.0); }
        if (z + 1 < nz) { a.col_indices.push_back(flat(x, y, z + 1)); a.values.push_back(-1.0); }
        a.row_offsets.push_back(a.nnz());
      }
  return a;
}

}  // namespace linalg
}  // namespace esrsim
