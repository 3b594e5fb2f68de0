// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>

#include "esrsim/halo.hpp"
#include "esrsim/preconditioner.hpp"
#include "esrsim/simtime.hpp"
#include "esrsim/state.hpp"

namespace esrsim {
namespace pcg {

/// Lock-step distributed PCG: one logical rank per index block, all
/// global reductions accumulated rank-major/index-major into a single
/// accumulator, so iterates are bitwise independent of the rank count
/// and reproducible after recovery. Hooks never touch the arithmetic.
class Engine {
 public:
  struct Callbacks {
    /// Iteration is about to execute; state is at iteration j.
    std::function<void(std::uint64_t j)> at_iteration_start;
    /// Compute-phase fault injection point (after the SpMV).
    std::function<void(std::uint64_t j)> after_spmv;
    /// Entering a communication phase (halo or reduction); the failure
    /// detection point.
    std::function<void(std::uint64_t j)> global_sync;
  };

  Engine(const linalg::CsrMatrix& a, std::span<const double> b,
         const linalg::Preconditioner& p, const linalg::Partition& part,
         const SolveConfig& cfg, const cluster::HaloPlan& plan,
         OverheadLedger* ledger = nullptr, ClockSet* clocks = nullptr,
         const CostModel* costs = nullptr);

  void init();

  /// Advances one iteration across all ranks. Returns true when the
  /// true relative residual dropped below tol at the end of this
  /// iteration.
  bool step(PersistenceHook* hook, const Callbacks& cb = {});

  std::uint64_t iteration() const { return j_; }
  int proc() const { return part_.proc; }
  const linalg::Partition& partition() const { return part_; }

  SolverState& state(int rank) { return states_[rank]; }
  const SolverState& state(int rank) const { return states_[rank]; }

  double bnorm() const { return bnorm_; }
  double last_relative_residual() const { return last_rel_; }

  std::vector<double> assemble_x() const;

  // --- recovery support ---
  /// Rewinds the iteration counter after all rank states were restored
  /// or reconstructed at iteration j.
  void set_iteration(std::uint64_t j);
  /// The re-executed rollback iteration must not repeat its persistence
  /// hook; the pair it closes is already stored.
  void skip_next_persist() { skip_persist_once_ = true; }
  /// Recomputes the cached global scalar r^T z in fixed order and
  /// installs it on every rank.
  double recompute_rz();

 private:
  double reduce_dot_states(std::vector<double> SolverState::*u,
                           std::vector<double> SolverState::*v);
  double true_residual_norm(const Callbacks& cb);
  std::span<const double> slice_of_p(int rank) const;

  const linalg::CsrMatrix& a_;
  std::vector<double> b_;
  const linalg::Preconditioner& precond_;
  linalg::Partition part_;
  SolveConfig cfg_;
  const cluster::HaloPlan& plan_;
  OverheadLedger* ledger_;
  ClockSet* clocks_;
  CostModel costs_;
  PersistSchedule sched_;

  std::vector<SolverState> states_;
  std::vector<std::vector<double>> q_;  // per-rank A*p slice
  std::uint64_t j_ = 0;
  double bnorm_ = 0.0;
  double last_rel_ = 0.0;
  bool skip_persist_once_ = false;
};

struct Solution {
  bool converged = false;
  std::uint64_t iterations = 0;
  double rel_residual = 0.0;
  std::vector<double> x;
};

/// Crash-free distributed solve. `hook` may be null (recovery_mode
/// none); the iterate sequence is identical either way.
Solution run(const linalg::CsrMatrix& a, std::span<const double> b,
             const linalg::Preconditioner& p, const linalg::Partition& part,
             const SolveConfig& cfg, PersistenceHook* hook = nullptr,
             OverheadLedger* ledger = nullptr, ClockSet* clocks = nullptr,
             const CostModel* costs = nullptr,
             const Engine::Callbacks& cb = {});

}  // namespace pcg
}  // namespace esrsim
