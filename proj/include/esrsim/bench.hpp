// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "esrsim/cluster.hpp"

namespace esrsim {
namespace bench {

/// Closed-form accounting inputs when no concrete matrix is at hand;
/// S is the average nonzeros per row (7 for the 3-D stencil).
struct AccountQuery {
  std::uint64_t n = 0;
  double sparsity = 7.0;
  int proc = 1;
  int c = 0;
  RecoveryMode mode = RecoveryMode::none;
  std::uint64_t persist_period = 1;
};

/// Rate/residency ledger from the closed-form memory model alone.
/// Halo traffic is unknown without a matrix and reported as zero; the
/// in-memory redundancy wire rate carries no halo discount.
OverheadLedger account(const AccountQuery& q);

/// Shape of a finished run, extractable from its report; lets the
/// analytic side predict cumulative counters exactly.
struct RunShape {
  std::uint64_t iterations = 0;
  std::uint64_t steps = 0;
  std::uint64_t halo_exchanges = 0;
  std::uint64_t residual_checks = 0;
  std::uint64_t members = 0;
  std::uint64_t pairs = 0;
  struct Recovery {
    std::vector<int> victims;
    std::uint64_t rollback_j = 0;
    bool cold_restart = false;
  };
  std::vector<Recovery> recoveries;
};

RunShape shape_of(const cluster::RunReport& report);

/// Structure-exact analytic ledger. Rate and residency fields are
/// always filled; with `shape` the totals are predicted too and match
/// a measured run field by field (time totals excepted: simulated time
/// is measured from the cost model, not re-derived).
OverheadLedger account(const linalg::CsrMatrix& a,
                       const linalg::Partition& part,
                       const pcg::SolveConfig& cfg,
                       const cluster::HaloPlan* halo = nullptr,
                       const RunShape* shape = nullptr);

/// Experiment matrix over {backend x proc x seed} for one problem.
struct ExperimentSpec {
  std::int64_t nx = 8, ny = 8, nz = 8;
  std::vector<int> procs{2, 4};
  std::vector<RecoveryMode> backends{RecoveryMode::none};
  int c = 0;
  std::uint64_t persist_period = 1;
  double tol = 1e-8;
  std::uint64_t max_iter = 1000;
  std::vector<std::uint64_t> seeds{0};
  std::string fault;  // "j:phase:ranks;..." template, may be empty
  int slots_per_node = 2;
  std::uint64_t mv_bytes = 0;
  std::uint64_t mnv_bytes = 0;
  std::string out = "results.csv";

  static ExperimentSpec load(const std::filesystem::path& json_path);
};

/// Runs the matrix and writes one CSV (fixed columns: backend, proc, c,
/// n, iter_converge, persist_simtime, wire_bytes, ram_red_bytes,
/// nvm_resident_bytes, nvm_written_bytes, recovered, status) under
/// `out_dir`. Returns the CSV path. Reruns with the same spec are
/// byte-identical. Time columns are simulated units, never wall-clock.
std::filesystem::path run_experiments(const ExperimentSpec& spec,
                                      const std::filesystem::path& out_dir);

/// Headline figure: single-copy NVRAM gigabytes for a global vector of
/// n values (n * 8 bytes, GB = 1e9).
double single_copy_nvram_gb(std::uint64_t n);

}  // namespace bench
}  // namespace esrsim
