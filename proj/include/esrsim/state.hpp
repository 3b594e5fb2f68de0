// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "esrsim/ledger.hpp"
#include "esrsim/simtime.hpp"

namespace esrsim {
namespace pcg {

struct SolveConfig {
  double tol = 1e-8;              // relative residual threshold
  std::uint64_t max_iter = 1000;
  std::uint64_t persist_period = 1;
  RecoveryMode recovery_mode = RecoveryMode::none;
  int c = 0;                      // simultaneous failures tolerated
  bool validate_invariants = false;  // residual/recurrence asserts (tests)
};

/// Per-rank solver state over the rank's index block. The scalars are
/// global quantities, identical bits on every rank.
struct SolverState {
  std::uint64_t j = 0;
  std::vector<double> x, r, z, p;
  double alpha = 0.0;
  double beta_prev = 0.0;  // beta^(j-1)
  double rz = 0.0;         // cached r^(j)T z^(j)
};

/// Redundancy/persistence hook, invoked at the start of every
/// persistence-pair iteration while p^(j) and beta^(j-1) are current.
/// `pair_close` marks the later iteration of the pair, the rollback
/// target should a failure occur afterwards.
class PersistenceHook {
 public:
  virtual ~PersistenceHook() = default;
  virtual void on_persist(std::uint64_t j, bool pair_close, int rank,
                          std::span<const double> p_slice,
                          double beta_prev) = 0;
  /// Called once after all ranks' on_persist of this iteration; the
  /// collective commit point for windowed backends.
  virtual void on_persist_phase_done(std::uint64_t /*j*/,
                                     bool /*pair_close*/) {}
};

/// Per-rank simulated clocks (compute ranks plus the PRD rank).
struct ClockSet {
  std::vector<SimTime> t;
  SimTime prd = 0;

  explicit ClockSet(int proc = 0) : t(proc, 0) {}
  SimTime max_compute() const {
    SimTime m = 0;
    for (SimTime v : t) m = std::max(m, v);
    return m;
  }
  void sync_all(SimTime latency) {
    const SimTime m = max_compute() + latency;
    for (auto& v : t) v = m;
  }
};

}  // namespace pcg
}  // namespace esrsim
