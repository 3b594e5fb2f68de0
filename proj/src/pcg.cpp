// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/pcg.hpp"

#include <cmath>

#include "esrsim/error.hpp"
#include "esrsim/vecops.hpp"

namespace esrsim {
namespace pcg {

Engine::Engine(const linalg::CsrMatrix& a, std::span<const double> b,
               const linalg::Preconditioner& p,
               const linalg::Partition& part, const SolveConfig& cfg,
               const cluster::HaloPlan& plan, OverheadLedger* ledger,
               ClockSet* clocks, const CostModel* costs)
    : a_(a),
      b_(b.begin(), b.end()),
      precond_(p),
      part_(part),
      cfg_(cfg),
      plan_(plan),
      ledger_(ledger),
      clocks_(clocks),
      costs_(costs ? *costs : CostModel{}),
      sched_{cfg.persist_period} {
  if (a.n_rows != a.n_cols || static_cast<std::int64_t>(b.size()) != a.n_rows)
    raise(ErrorCode::shape_mismatch, "system dimensions");
  if (cfg.persist_period < 1)
    raise(ErrorCode::invalid_config, "persist_period must be >= 1");
  if (cfg.c < 0 || cfg.c >= part.proc)
    raise(ErrorCode::invalid_config, "failure tolerance c must be in [0, proc)");
  states_.resize(part.proc);
  q_.resize(part.proc);
}

void Engine::init() {
  j_ = 0;
  skip_persist_once_ = false;
  for (int s = 0; s < part_.proc; ++s) {
    auto& st = states_[s];
    const std::int64_t lo = part_.block_begin(s), m = part_.block_size(s);
    st.j = 0;
    st.x.assign(m, 0.0);
    st.r.assign(b_.begin() + lo, b_.begin() + lo + m);  // r0 = b - A*0
    st.z.resize(m);
    precond_.apply(st.r, st.z, lo);
    st.p = st.z;
    st.alpha = 0.0;
    st.beta_prev = 0.0;
  }
  bnorm_ = std::sqrt(reduce_dot_states(&SolverState::r, &SolverState::r));
  const double rz = reduce_dot_states(&SolverState::r, &SolverState::z);
  for (auto& st : states_) st.rz = rz;
  last_rel_ = 1.0;
}

std::span<const double> Engine::slice_of_p(int rank) const {
  return states_[rank].p;
}

double Engine::reduce_dot_states(std::vector<double> SolverState::*u,
                                 std::vector<double> SolverState::*v) {
  // Rank-major, index-major, single accumulator: equals the flat
  // sequential dot over the assembled vectors.
  double acc = 0.0;
  for (const auto& st : states_) {
    const auto& uu = st.*u;
    const auto& vv = st.*v;
    for (std::size_t i = 0; i < uu.size(); ++i) acc += uu[i] * vv[i];
  }
  if (clocks_) clocks_->sync_all(costs_.reduce_latency);
  return acc;
}

double Engine::true_residual_norm(const Callbacks& cb) {
  if (cb.global_sync) cb.global_sync(j_);
  auto ghosts = plan_.exchange(
      part_.proc, [&](int rank) -> std::span<const double> {
        return states_[rank].x;
      });
  if (ledger_) {
    ledger_->wire_halo_values_total += plan_.total_values_per_exchange();
    ++ledger_->halo_exchanges_total;
  }
  double acc = 0.0;
  for (int s = 0; s < part_.proc; ++s) {
    const std::int64_t lo = part_.block_begin(s), hi = part_.block_end(s);
    const auto& ghost = ghosts[s];
    for (std::int64_t row = lo; row < hi; ++row) {
      const double ax = linalg::spmv_row(a_, row, [&](std::int64_t col) {
        if (col >= lo && col < hi) return states_[s].x[col - lo];
        return ghost.at(col);
      });
      const double t = b_[row] - ax;
      acc += t * t;
    }
  }
  if (clocks_) clocks_->sync_all(costs_.reduce_latency);
  if (ledger_) ++ledger_->residual_checks;
  return std::sqrt(acc);
}

bool Engine::step(PersistenceHook* hook, const Callbacks& cb) {
  const std::uint64_t j = j_;
  if (j == 0 && bnorm_ == 0.0) {
    last_rel_ = 0.0;
    return true;  // b = 0: x = 0 is exact
  }
  if (cb.at_iteration_start) cb.at_iteration_start(j);
  if (ledger_) ++ledger_->steps_executed;

  // Redundancy/persistence hook, arithmetically inert.
  if (hook && sched_.is_member(j)) {
    if (skip_persist_once_) {
      skip_persist_once_ = false;
    } else {
      const bool close = sched_.is_pair_close(j);
      for (int s = 0; s < part_.proc; ++s)
        hook->on_persist(j, close, s, states_[s].p, states_[s].beta_prev);
      hook->on_persist_phase_done(j, close);
      if (ledger_) {
        ++ledger_->persist_members_executed;
        if (close) {
          ++ledger_->pairs_completed;
          ledger_->persistence_pairs.emplace_back(j - 1, j);
        }
      }
    }
  }

  // Halo exchange for p, then the local SpMV rows.
  if (cb.global_sync) cb.global_sync(j);
  auto ghosts = plan_.exchange(
      part_.proc, [&](int rank) -> std::span<const double> {
        return states_[rank].p;
      });
  if (ledger_) {
    ledger_->wire_halo_values_total += plan_.total_values_per_exchange();
    ++ledger_->halo_exchanges_total;
  }
  for (int s = 0; s < part_.proc; ++s) {
    const std::int64_t lo = part_.block_begin(s), hi = part_.block_end(s);
    auto& q = q_[s];
    q.resize(hi - lo);
    const auto& ghost = ghosts[s];
    for (std::int64_t row = lo; row < hi; ++row)
      q[row - lo] = linalg::spmv_row(a_, row, [&](std::int64_t col) {
        if (col >= lo && col < hi) return states_[s].p[col - lo];
        return ghost.at(col);
      });
    if (clocks_)
      clocks_->t[s] += costs_.compute_per_nnz *
                       (a_.row_offsets[hi] - a_.row_offsets[lo]);
  }
  if (cb.after_spmv) cb.after_spmv(j);

  // alpha = rz / p^T A p
  if (cb.global_sync) cb.global_sync(j);
  double pap = 0.0;
  for (int s = 0; s < part_.proc; ++s) {
    const auto& p = states_[s].p;
    const auto& q = q_[s];
    for (std::size_t i = 0; i < p.size(); ++i) pap += p[i] * q[i];
  }
  if (clocks_) clocks_->sync_all(costs_.reduce_latency);
  if (!std::isfinite(pap)) raise(ErrorCode::numerical_breakdown, "p^T A p");
  if (pap <= 0.0)
    raise(ErrorCode::not_spd, "non-positive curvature p^T A p");
  const double rz = states_[0].rz;
  const double alpha = rz / pap;
  if (!std::isfinite(alpha)) raise(ErrorCode::numerical_breakdown, "alpha");

  // x += alpha p ; r -= alpha q ; z = P r
  for (int s = 0; s < part_.proc; ++s) {
    auto& st = states_[s];
    const std::int64_t lo = part_.block_begin(s);
    for (std::size_t i = 0; i < st.x.size(); ++i) {
      st.x[i] += alpha * st.p[i];
      st.r[i] -= alpha * q_[s][i];
    }
    precond_.apply(st.r, st.z, lo);
    st.alpha = alpha;
  }

  // beta = rz_new / rz ; p = z + beta p
  const double rz_new = reduce_dot_states(&SolverState::r, &SolverState::z);
  if (!std::isfinite(rz_new)) raise(ErrorCode::numerical_breakdown, "r^T z");
  const double beta = rz > 0.0 ? rz_new / rz : 0.0;
  for (int s = 0; s < part_.proc; ++s) {
    auto& st = states_[s];
    for (std::size_t i = 0; i < st.p.size(); ++i) {
      const double p_old = st.p[i];
      st.p[i] = st.z[i] + beta * p_old;
      if (cfg_.validate_invariants) {
        // z^(j+1) = p^(j+1) - beta^(j) p^(j), the identity reconstruction
        // relies on; holds to rounding.
        const double back = st.p[i] - beta * p_old;
        const double scale = std::abs(st.z[i]) + std::abs(beta * p_old) + 1.0;
        if (std::abs(back - st.z[i]) > 1e-12 * scale)
          raise(ErrorCode::numerical_breakdown, "p-recurrence drift");
      }
    }
    st.beta_prev = beta;
    st.rz = rz_new;
  }

  // Convergence: recurrence residual every iteration, true residual on
  // candidate convergence and every 10th iteration.
  const double rr = reduce_dot_states(&SolverState::r, &SolverState::r);
  const double rel_rec = std::sqrt(rr) / bnorm_;
  bool converged = false;
  if (rel_rec <= cfg_.tol || j % 10 == 9) {
    const double rel_true = true_residual_norm(cb) / bnorm_;
    last_rel_ = rel_true;
    converged = rel_true <= cfg_.tol;
  } else {
    last_rel_ = rel_rec;
  }

  if (cfg_.validate_invariants) {
    const double rel_true = true_residual_norm(cb) / bnorm_;
    if (rel_true > 1e-8 + 10 * rel_rec)
      raise(ErrorCode::numerical_breakdown, "recurrence residual drift");
  }

  ++j_;
  for (auto& st : states_) st.j = j_;
  if (ledger_) ledger_->iterations_executed = j_;
  return converged;
}

std::vector<double> Engine::assemble_x() const {
  std::vector<double> x;
  x.reserve(a_.n_rows);
  for (const auto& st : states_) x.insert(x.end(), st.x.begin(), st.x.end());
  return x;
}

void Engine::set_iteration(std::uint64_t j) {
  j_ = j;
  for (auto& st : states_) st.j = j;
}

double Engine::recompute_rz() {
  const double rz = reduce_dot_states(&SolverState::r, &SolverState::z);
  for (auto& st : states_) st.rz = rz;
  return rz;
}

Solution run(const linalg::CsrMatrix& a, std::span<const double> b,
             const linalg::Preconditioner& p, const linalg::Partition& part,
             const SolveConfig& cfg, PersistenceHook* hook,
             OverheadLedger* ledger, ClockSet* clocks, const CostModel* costs,
             const Engine::Callbacks& cb) {
  cluster::HaloPlan plan(a, part);
  Engine engine(a, b, p, part, cfg, plan, ledger, clocks, costs);
  engine.init();
  Solution sol;
  while (engine.iteration() < cfg.max_iter) {
    if (engine.step(hook, cb)) {
      sol.converged = true;
      break;
    }
  }
  sol.iterations = engine.iteration();
  sol.rel_residual = engine.last_relative_residual();
  sol.x = engine.assemble_x();
  return sol;
}

}  // namespace pcg
}  // namespace esrsim
