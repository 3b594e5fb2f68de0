// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/reconstruct.hpp"

#include <algorithm>
#include <string>

#include "esrsim/dense.hpp"
#include "esrsim/error.hpp"

namespace esrsim {
namespace esr {

std::map<int, ReconstructedSlices> reconstruct(
    const linalg::CsrMatrix& a, const linalg::Preconditioner& p,
    std::span<const double> b, const linalg::Partition& part,
    const std::vector<int>& failed,
    const std::map<int, RecoveryRecord>& records,
    const SurvivorView& survivors, int c) {
  if (failed.empty()) return {};
  if (static_cast<int>(failed.size()) > c)
    raise(ErrorCode::unrecoverable,
          std::to_string(failed.size()) + " simultaneous failures exceed c=" +
              std::to_string(c));
  if (!std::is_sorted(failed.begin(), failed.end()))
    raise(ErrorCode::invalid_config, "failed ranks must be sorted");

  std::uint64_t j = 0;
  bool first = true;
  for (int f : failed) {
    auto it = records.find(f);
    if (it == records.end())
      raise(ErrorCode::cold_start,
            "missing record for rank " + std::to_string(f));
    const RecoveryRecord& rec = it->second;
    if (!rec.checksum_ok())
      raise(ErrorCode::corrupt_record,
            "record of rank " + std::to_string(f) + " failed its checksum");
    if (rec.owner != f)
      raise(ErrorCode::corrupt_record, "record owner mismatch");
    if (static_cast<std::int64_t>(rec.p_curr.size()) != part.block_size(f))
      raise(ErrorCode::shape_mismatch, "record slice length");
    if (first) {
      j = rec.j;
      first = false;
    } else if (rec.j != j) {
      raise(ErrorCode::stale_record,
            "records span different iterations (" + std::to_string(j) +
                " vs " + std::to_string(rec.j) + ")");
    }
  }

  // Assembled failed index set I_f, ascending (ranks are sorted and
  // blocks are contiguous ascending).
  std::vector<std::int64_t> idx_f;
  for (int f : failed)
    for (std::int64_t i = part.block_begin(f); i < part.block_end(f); ++i)
      idx_f.push_back(i);
  std::vector<char> in_failed(a.n_rows, 0);
  for (std::int64_t i : idx_f) in_failed[i] = 1;

  // z_f from the search-direction recurrence; r_f from the
  // preconditioner equation. P is diagonal (identity or Jacobi), so
  // P[f,~f] vanishes and the solve is a per-entry division.
  std::vector<double> z_f(idx_f.size()), r_f(idx_f.size());
  {
    std::size_t pos = 0;
    for (int f : failed) {
      const RecoveryRecord& rec = records.at(f);
      const double beta = rec.beta_prev;
      const std::int64_t lo = part.block_begin(f);
      for (std::size_t i = 0; i < rec.p_curr.size(); ++i, ++pos) {
        z_f[pos] = rec.p_curr[i] - beta * rec.p_prev[i];
        p.apply_inverse(std::span(&z_f[pos], 1), std::span(&r_f[pos], 1),
                        lo + static_cast<std::int64_t>(i));
      }
    }
  }

  // w = b_f - r_f - A[f,~f] x_surv, accumulated in storage order.
  std::vector<double> w(idx_f.size());
  for (std::size_t k = 0; k < idx_f.size(); ++k) {
    const std::int64_t row = idx_f[k];
    double acc = 0.0;
    for (std::int64_t t = a.row_offsets[row]; t < a.row_offsets[row + 1]; ++t) {
      const std::int64_t col = a.col_indices[t];
      if (!in_failed[col]) acc += a.values[t] * survivors.x[col];
    }
    w[k] = b[row] - r_f[k] - acc;
  }

  // x_f from the principal submatrix A[f,f]; SPD since A is.
  const auto a_ff = linalg::submatrix(a, idx_f, idx_f);
  const auto x_f =
      linalg::cholesky_solve(linalg::DenseMatrix::from_csr(a_ff), w);

  std::map<int, ReconstructedSlices> out;
  std::size_t pos = 0;
  for (int f : failed) {
    const RecoveryRecord& rec = records.at(f);
    ReconstructedSlices s;
    const std::size_t m = rec.p_curr.size();
    s.p = rec.p_curr;
    s.x.assign(x_f.begin() + pos, x_f.begin() + pos + m);
    s.r.assign(r_f.begin() + pos, r_f.begin() + pos + m);
    s.z.assign(z_f.begin() + pos, z_f.begin() + pos + m);
    out.emplace(f, std::move(s));
    pos += m;
  }
  return out;
}

}  // namespace esr
}  // namespace esrsim
