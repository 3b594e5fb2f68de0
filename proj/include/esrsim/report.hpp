// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "esrsim/ledger.hpp"
#include "esrsim/reconstruct.hpp"
#include "esrsim/simtime.hpp"
#include "esrsim/state.hpp"

namespace esrsim {
namespace cluster {

enum class RunStatus { converged, max_iter, unrecoverable, capacity_exceeded };
const char* to_string(RunStatus s);

/// One event of the run log. Serialized as
///   kind iteration rank bytes simtime [key=value ...]
/// with floating-point extras rendered as hex floats so equal runs
/// serialize to identical bytes.
struct ReportLine {
  std::string kind;
  std::int64_t iter = -1;
  int rank = -1;
  std::uint64_t bytes = 0;
  SimTime time = 0;
  std::vector<std::pair<std::string, std::string>> extras;

  std::string render() const;
};

struct RecoveryEvent {
  std::uint64_t detected_at_j = 0;
  std::uint64_t rollback_j = 0;
  bool cold_restart = false;
  std::vector<int> victims;
  std::map<int, int> replacement_node;
  std::map<int, esr::ReconstructedSlices> reconstructed;
};

struct RunReport {
  RunStatus status = RunStatus::max_iter;
  std::string status_detail;
  std::uint64_t iterations = 0;
  double rel_residual = 0.0;
  std::vector<double> final_x;
  OverheadLedger ledger;
  std::vector<RecoveryEvent> recoveries;
  std::vector<ReportLine> lines;

  /// Per-executed-iteration hash of all rank states (x, r, z, p and the
  /// scalars), in execution order; rollback re-executions append again.
  std::vector<std::uint64_t> iterate_hashes;

  /// Full state capture per iteration index (last execution wins);
  /// enabled on request, test use only.
  std::map<std::uint64_t, std::vector<pcg::SolverState>> state_trace;

  std::string serialize() const;
};

std::string hex_double(double v);

}  // namespace cluster
}  // namespace esrsim
