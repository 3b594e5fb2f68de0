// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <vector>

#include "esrsim/csr.hpp"
#include "esrsim/preconditioner.hpp"
#include "esrsim/record.hpp"

namespace esrsim {
namespace esr {

struct ReconstructedSlices {
  std::vector<double> x, r, z, p;
};

/// Survivors' contribution to reconstruction: full-length vectors with
/// the surviving blocks filled in (failed blocks are never read).
struct SurvivorView {
  std::vector<double> x, r;
};

/// Exact state reconstruction of the failed blocks at iteration j from
/// the two persisted search directions, the coupling scalar, and the
/// survivors' x and r:
///
///   z_f = p_curr - beta_prev * p_prev          (search recurrence)
///   solve P[f,f] r_f = z_f - P[f,~f] r_surv    (diagonal P: per entry)
///   w   = b_f - r_f - A[f,~f] x_surv
///   solve A[f,f] x_f = w                      (dense Cholesky)
///
/// `failed` must be sorted ascending; records must share one iteration
/// and carry valid checksums. Throws stale_record on mismatched
/// iterations, corrupt_record on checksum failure, and unrecoverable
/// when more ranks failed than the configured tolerance c.
std::map<int, ReconstructedSlices> reconstruct(
    const linalg::CsrMatrix& a, const linalg::Preconditioner& p,
    std::span<const double> b, const linalg::Partition& part,
    const std::vector<int>& failed,
    const std::map<int, RecoveryRecord>& records,
    const SurvivorView& survivors, int c);

}  // namespace esr
}  // namespace esrsim
