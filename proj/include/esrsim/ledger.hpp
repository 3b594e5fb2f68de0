// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace esrsim {

enum class RecoveryMode { none, esr_inmem, nvm_local, nvm_prd };

const char* to_string(RecoveryMode m);
RecoveryMode recovery_mode_from_string(const std::string& s);

/// Byte-exact memory and traffic accounting over the distributed
/// memory model: every rank holds the full sparse-matrix
/// representation (S*n values, S = nnz/n) plus four vector slices of
/// n/proc values, and a value is 8 bytes. Two flavors of NVM counters
/// are kept: single-copy counters count each recovery value once per
/// persistence iteration (one p-slice per rank), while physical
/// counters count what actually reaches the medium (record metadata,
/// slot headers and the alternating-slot duplication included).
///
/// Rate fields (`*_per_*`) are closed-form; total fields accumulate
/// during a run. `bench::account` produces the same structure
/// analytically so the two can be compared field by field.
struct OverheadLedger {
  // model parameters
  std::uint64_t n = 0;
  std::uint64_t nnz = 0;
  int proc = 1;
  int c = 0;
  std::uint64_t persist_period = 1;
  RecoveryMode mode = RecoveryMode::none;
  double sparsity_factor = 0.0;  // S = nnz / n

  // volatile-memory model (values)
  std::uint64_t ram_compute_values = 0;      // proc*nnz + 4n
  std::uint64_t ram_redundancy_values = 0;   // retained copies, steady state

  // non-volatile, single-copy (values)
  std::uint64_t nvm_resident_values = 0;             // 2n for durable modes
  std::uint64_t nvm_written_values_per_persist = 0;  // n per persistence iteration

  // non-volatile, single-copy cumulative (values)
  std::uint64_t nvm_written_values_total = 0;

  // non-volatile, physical (bytes)
  std::uint64_t nvm_slot_bytes_resident = 0;   // both slots, headers included
  std::uint64_t nvm_bytes_written_total = 0;   // cumulative medium writes
  std::uint64_t nvm_commits_total = 0;         // slot-pair commits issued

  // wire rates (vector entries; metadata counted in bytes separately)
  std::uint64_t wire_halo_values_per_iter = 0;
  std::uint64_t wire_redundancy_values_per_persist = 0;

  // wire totals (measured or predicted from the run shape)
  std::uint64_t wire_halo_values_total = 0;
  std::uint64_t wire_redundancy_values_total = 0;
  std::uint64_t wire_recovery_values_total = 0;
  std::uint64_t wire_meta_bytes_total = 0;

  // simulated-time totals
  std::uint64_t persist_simtime_total = 0;

  // run shape
  std::uint64_t iterations_executed = 0;  // final iteration index
  std::uint64_t steps_executed = 0;       // step attempts incl. re-runs
  std::uint64_t halo_exchanges_total = 0;
  std::uint64_t residual_checks = 0;
  std::uint64_t persist_members_executed = 0;
  std::uint64_t pairs_completed = 0;
  std::uint64_t recoveries = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> persistence_pairs;

  std::uint64_t ram_total_bytes() const {
    return 8 * (ram_compute_values + ram_redundancy_values);
  }
  std::uint64_t wire_bytes_total() const {
    return 8 * (wire_halo_values_total + wire_redundancy_values_total +
                wire_recovery_values_total) +
           wire_meta_bytes_total;
  }

  std::string pretty() const;
};

/// Persistence-pair schedule shared by the solver and the analytic
/// accounting. Pairs sit at iterations (k*period, k*period + 1) for
/// k >= 1; with period 1 every iteration j >= 1 participates and every
/// j >= 2 closes a pair.
struct PersistSchedule {
  std::uint64_t period = 1;

  bool is_member(std::uint64_t j) const {
    if (j < std::max<std::uint64_t>(period, 1)) return false;
    if (period <= 1) return true;
    return j % period == 0 || j % period == 1;
  }
  bool is_pair_close(std::uint64_t j) const {
    if (period <= 1) return j >= 2;
    return j >= period + 1 && j % period == 1;
  }
  std::uint64_t members_up_to(std::uint64_t last_iter) const;  // j in [1, last]
  std::uint64_t pairs_up_to(std::uint64_t last_iter) const;
};

}  // namespace esrsim
