// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "esrsim/csr.hpp"

namespace esrsim {
namespace linalg {

/// 7-point stencil of the 3-D Poisson operator on an nx x ny x nz grid
/// with unit spacing and Dirichlet truncation: diagonal 6, -1 at each
/// existing axis neighbor, missing neighbors simply absent. Grid points
/// are numbered x-fastest: idx = x + nx*(y + ny*z). The result is
/// symmetric positive definite.
CsrMatrix gen_poisson_7pt(std::int64_t nx, std::int64_t ny, std::int64_t nz);

}  // namespace linalg
}  // namespace esrsim
