// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/preconditioner.hpp"

#include <cmath>

#include "esrsim/error.hpp"

namespace esrsim {
namespace linalg {

void Preconditioner::apply(std::span<const double> r, std::span<double> z,
                           std::int64_t offset) const {
  if (r.size() != z.size())
    raise(ErrorCode::shape_mismatch, "preconditioner apply slice lengths");
  if (kind == PreconditionerKind::identity) {
    for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i];
    return;
  }
  for (std::size_t i = 0; i < r.size(); ++i)
    z[i] = diag_inverse[offset + i] * r[i];
}

void Preconditioner::apply_inverse(std::span<const double> z,
                                   std::span<double> r,
                                   std::int64_t offset) const {
  if (r.size() != z.size())
    raise(ErrorCode::shape_mismatch, "preconditioner solve slice lengths");
  if (kind == PreconditionerKind::identity) {
    for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i];
    return;
  }
  for (std::size_t i = 0; i < z.size(); ++i)
    r[i] = z[i] / diag_inverse[offset + i];
}

Preconditioner Preconditioner::identity() { return Preconditioner{}; }

Preconditioner Preconditioner::jacobi(const CsrMatrix& a) {
  Preconditioner p;
  p.kind = PreconditionerKind::jacobi;
  p.diag_inverse.resize(a.n_rows);
  for (std::int64_t i = 0; i < a.n_rows; ++i) {
    const double d = a.at(i, i);
    if (!(d > 0.0) || !std::isfinite(d))
      raise(ErrorCode::not_spd, "Jacobi needs a positive diagonal");
    p.diag_inverse[i] = 1.0 / d;
  }
  return p;
}

}  // namespace linalg
}  // namespace esrsim
