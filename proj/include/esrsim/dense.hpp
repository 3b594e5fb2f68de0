// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "esrsim/csr.hpp"

namespace esrsim {
namespace linalg {

/// Row-major dense square matrix, used for the small principal
/// submatrices the reconstruction phase factorizes.
struct DenseMatrix {
  std::int64_t n = 0;
  std::vector<double> data;  // n*n row-major

  double& at(std::int64_t r, std::int64_t c) { return data[r * n + c]; }
  double at(std::int64_t r, std::int64_t c) const { return data[r * n + c]; }

  static DenseMatrix zero(std::int64_t n) {
    return DenseMatrix{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  }
  static DenseMatrix from_csr(const CsrMatrix& a);
};

/// Solves A*y = w for SPD A via dense Cholesky (LL^T). Throws not_spd
/// on a non-positive pivot.
std::vector<double> cholesky_solve(const DenseMatrix& a,
                                   std::span<const double> w);

}  // namespace linalg
}  // namespace esrsim
