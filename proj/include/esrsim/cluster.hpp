// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <filesystem>
#include <memory>

#include "esrsim/pcg.hpp"
#include "esrsim/pstore.hpp"
#include "esrsim/report.hpp"

namespace esrsim {
namespace cluster {

/// Cluster topology and capacities. Compute ranks 0..proc-1 occupy
/// `nodes` nodes with `slots_per_node` slots each; nvm_prd adds one PRD
/// rank (id proc) on its own storage node. Capacities of 0 mean
/// unbounded.
struct ClusterConfig {
  int nodes = 1;
  int slots_per_node = 1;
  int proc = 1;
  std::vector<int> rank_to_node;  // defaults to rank / slots_per_node
  std::uint64_t seed = 0;
  std::uint64_t mv_bytes = 0;
  std::uint64_t mnv_bytes = 0;
  CostModel costs;
  std::filesystem::path storage_dir = ".esrsim_store";

  int node_of(int rank) const {
    return rank_to_node.empty() ? rank / slots_per_node : rank_to_node[rank];
  }
};

struct FaultEvent {
  enum class Phase { compute, mid_persist };
  std::uint64_t j = 0;
  Phase phase = Phase::compute;
  std::size_t cut = 0;  // mid_persist: surviving bytes (copies for peer RAM)
  std::vector<int> victims;
};

struct FaultPlan {
  std::vector<FaultEvent> events;
};

/// Deterministic multi-rank simulator: lock-step rank scheduling,
/// fail-stop fault injection at planned points, an oracle failure
/// detector, replacement-rank spawning, and the reconstruction driver.
/// Identical (config, solve config, fault plan, seed) inputs produce a
/// bitwise-identical report.
class Simulator {
 public:
  Simulator(const ClusterConfig& cc, const pcg::SolveConfig& sc,
            const linalg::CsrMatrix& a, std::vector<double> b,
            linalg::PreconditionerKind pk);

  RunReport simulate(const FaultPlan& plan = {},
                     bool capture_state_trace = false);

  /// Oracle detector: exactly the currently dead compute ranks.
  std::vector<int> detect_failures() const;

  const HaloPlan& halo_plan() const { return plan_; }
  const linalg::Partition& partition() const { return part_; }
  pstore::Backend* backend() { return backend_.get(); }

 private:
  struct FailureInterrupt {};
  class HookWrap;

  void validate_plan(const FaultPlan& plan) const;
  bool capacity_gate(RunReport& rep);
  void kill(const std::vector<int>& victims, std::uint64_t j,
            const char* phase, RunReport& rep);
  void recover(RunReport& rep, std::uint64_t detected_at);
  void snapshot_rank(int rank, std::uint64_t j);
  std::uint64_t hash_states() const;
  void line(RunReport& rep, ReportLine l) { rep.lines.push_back(std::move(l)); }

  ClusterConfig ccfg_;
  std::vector<int> initial_mapping_;  // rank_to_node as configured
  pcg::SolveConfig scfg_;
  linalg::CsrMatrix a_;
  std::vector<double> b_;
  linalg::Preconditioner precond_;
  linalg::Partition part_;
  HaloPlan plan_;

  OverheadLedger ledger_;
  pcg::ClockSet clocks_;
  std::unique_ptr<pstore::Backend> backend_;
  std::unique_ptr<pcg::Engine> engine_;

  std::vector<char> alive_;
  std::vector<int> occupancy_;  // per compute node
  std::vector<std::deque<pcg::SolverState>> snapshots_;  // <= 2 per rank
  const FaultPlan* active_plan_ = nullptr;
};

/// Parses "j:phase:r1,r2,..." fault events separated by ';', with
/// phase `compute` or `mid_persist@<cut>`.
FaultPlan parse_fault_plan(const std::string& text);

}  // namespace cluster
}  // namespace esrsim
