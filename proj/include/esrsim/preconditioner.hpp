// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "esrsim/csr.hpp"

namespace esrsim {
namespace linalg {

enum class PreconditionerKind { identity, jacobi };

/// Diagonal preconditioners: identity (plain CG) and Jacobi
/// (P = diag(A)^-1). Both are block-diagonal under any row partition,
/// which keeps the preconditioner solve in the reconstruction phase a
/// per-entry division.
struct Preconditioner {
  PreconditionerKind kind = PreconditionerKind::identity;
  std::vector<double> diag_inverse;  // length n for jacobi, empty for identity

  /// z[i] = P * r restricted to [offset, offset + r.size()).
  void apply(std::span<const double> r, std::span<double> z,
             std::int64_t offset = 0) const;

  /// Solves P[i][i] * r = z for r on the same slice (diagonal solve).
  void apply_inverse(std::span<const double> z, std::span<double> r,
                     std::int64_t offset = 0) const;

  static Preconditioner identity();
  static Preconditioner jacobi(const CsrMatrix& a);
};

}  // namespace linalg
}  // namespace esrsim
