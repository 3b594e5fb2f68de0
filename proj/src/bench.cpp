// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/bench.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "esrsim/error.hpp"
#include "esrsim/poisson.hpp"
#include "esrsim/redundancy.hpp"

namespace esrsim {
namespace bench {

namespace {

constexpr std::uint64_t kRecordMetaBytes = 36;
constexpr std::uint64_t kEntryMetaBytes = 16;  // iteration + beta per copy

std::uint64_t non_self_holders(int proc, int c) {
  return std::min<std::uint64_t>(c + 1, proc - 1);
}

/// Record payload+header bytes for one rank's slot commit.
std::uint64_t slot_commit_bytes(std::int64_t slice) {
  return rma::SlotHeader::kSize +
         esr::RecoveryRecord::serialized_size(static_cast<std::size_t>(slice));
}

std::uint64_t prd_window_bytes(const linalg::Partition& part) {
  std::uint64_t total = 0;
  for (int s = 0; s < part.proc; ++s)
    total += esr::RecoveryRecord::serialized_size(
        static_cast<std::size_t>(part.block_size(s)));
  return total;
}

}  // namespace

double single_copy_nvram_gb(std::uint64_t n) {
  return static_cast<double>(n) * 8.0 / 1e9;
}

OverheadLedger account(const AccountQuery& q) {
  OverheadLedger l;
  l.n = q.n;
  l.nnz = static_cast<std::uint64_t>(std::llround(q.sparsity * q.n));
  l.proc = q.proc;
  l.c = q.c;
  l.persist_period = q.persist_period;
  l.mode = q.mode;
  l.sparsity_factor = q.sparsity;
  l.ram_compute_values = static_cast<std::uint64_t>(q.proc) * l.nnz + 4 * q.n;
  switch (q.mode) {
    case RecoveryMode::none:
      break;
    case RecoveryMode::esr_inmem:
      l.ram_redundancy_values = 2 * q.n * (static_cast<std::uint64_t>(q.c) + 1);
      l.wire_redundancy_values_per_persist = non_self_holders(q.proc, q.c) * q.n;
      break;
    case RecoveryMode::nvm_local:
      l.nvm_resident_values = 2 * q.n;
      l.nvm_written_values_per_persist = q.n;
      break;
    case RecoveryMode::nvm_prd:
      l.nvm_resident_values = 2 * q.n;
      l.nvm_written_values_per_persist = q.n;
      l.wire_redundancy_values_per_persist = q.n;
      break;
  }
  return l;
}

RunShape shape_of(const cluster::RunReport& report) {
  RunShape s;
  s.iterations = report.ledger.iterations_executed;
  s.steps = report.ledger.steps_executed;
  s.halo_exchanges = report.ledger.halo_exchanges_total;
  s.residual_checks = report.ledger.residual_checks;
  s.members = report.ledger.persist_members_executed;
  s.pairs = report.ledger.pairs_completed;
  for (const auto& r : report.recoveries)
    s.recoveries.push_back({r.victims, r.rollback_j, r.cold_restart});
  return s;
}

OverheadLedger account(const linalg::CsrMatrix& a,
                       const linalg::Partition& part,
                       const pcg::SolveConfig& cfg,
                       const cluster::HaloPlan* halo, const RunShape* shape) {
  const std::uint64_t n = static_cast<std::uint64_t>(a.n_rows);
  AccountQuery q;
  q.n = n;
  q.sparsity = static_cast<double>(a.nnz()) / static_cast<double>(a.n_rows);
  q.proc = part.proc;
  q.c = cfg.c;
  q.mode = cfg.recovery_mode;
  q.persist_period = cfg.persist_period;
  OverheadLedger l = account(q);
  l.nnz = static_cast<std::uint64_t>(a.nnz());
  l.ram_compute_values = static_cast<std::uint64_t>(part.proc) * l.nnz + 4 * n;

  if (halo) {
    l.wire_halo_values_per_iter = halo->total_values_per_exchange();
    if (cfg.recovery_mode == RecoveryMode::esr_inmem)
      l.wire_redundancy_values_per_persist =
          esr::peer_redundancy_wire_rate(part, cfg.c, halo);
  }

  if (!shape) return l;

  l.iterations_executed = shape->iterations;
  l.steps_executed = shape->steps;
  l.residual_checks = shape->residual_checks;
  l.halo_exchanges_total = shape->halo_exchanges;
  l.persist_members_executed = shape->members;
  l.pairs_completed = shape->pairs;
  l.recoveries = shape->recoveries.size();
  l.wire_halo_values_total =
      shape->halo_exchanges * l.wire_halo_values_per_iter;

  // A rollback onto the pair-close iteration skips that close entirely;
  // with period 1 the following close then has nothing staged and its
  // commit is skipped as well.
  std::uint64_t skipped_commits = 0;
  for (const auto& r : shape->recoveries)
    if (!r.cold_restart && cfg.persist_period == 1) ++skipped_commits;
  const std::uint64_t commit_pairs = shape->pairs - skipped_commits;

  switch (cfg.recovery_mode) {
    case RecoveryMode::none:
      break;
    case RecoveryMode::esr_inmem: {
      l.wire_redundancy_values_total =
          shape->members * l.wire_redundancy_values_per_persist;
      l.wire_meta_bytes_total = shape->members * non_self_holders(part.proc, cfg.c) *
                                part.proc * kEntryMetaBytes;
      break;
    }
    case RecoveryMode::nvm_local: {
      l.nvm_written_values_total = shape->members * n;
      l.nvm_commits_total = commit_pairs * part.proc;
      std::uint64_t per_pair = 0;
      for (int s = 0; s < part.proc; ++s)
        per_pair += slot_commit_bytes(part.block_size(s));
      l.nvm_bytes_written_total = commit_pairs * per_pair;
      break;
    }
    case RecoveryMode::nvm_prd: {
      l.nvm_written_values_total = shape->members * n;
      l.nvm_commits_total = commit_pairs;
      l.wire_redundancy_values_total = commit_pairs * 2 * n;
      l.wire_meta_bytes_total =
          commit_pairs * part.proc * kRecordMetaBytes;
      l.nvm_bytes_written_total =
          commit_pairs * (rma::SlotHeader::kSize + prd_window_bytes(part));
      break;
    }
  }

  // Recovery traffic: record fetches (network modes), the survivor
  // gather, and the reconstructed-state scatter.
  for (const auto& r : shape->recoveries) {
    if (r.cold_restart) continue;
    std::uint64_t victim_values = 0;
    for (int v : r.victims) victim_values += part.block_size(v);
    if (cfg.recovery_mode != RecoveryMode::nvm_local) {
      l.wire_recovery_values_total += 2 * victim_values;  // record fetch
      l.wire_meta_bytes_total += kRecordMetaBytes * r.victims.size();
    }
    l.wire_recovery_values_total += 2 * (n - victim_values);  // gather x, r
    l.wire_recovery_values_total += 4 * victim_values;        // scatter
  }

  // End-of-run residency; steady state holds for crash-free shapes.
  if (shape->recoveries.empty()) {
    switch (cfg.recovery_mode) {
      case RecoveryMode::none:
        break;
      case RecoveryMode::esr_inmem:
        l.ram_redundancy_values =
            shape->members >= 2
                ? 2 * n * (static_cast<std::uint64_t>(cfg.c) + 1)
                : shape->members * n * (static_cast<std::uint64_t>(cfg.c) + 1);
        break;
      case RecoveryMode::nvm_local: {
        l.nvm_resident_values = commit_pairs >= 1 ? 2 * n : 0;
        std::uint64_t bytes = 0;
        for (int s = 0; s < part.proc; ++s)
          bytes += std::min<std::uint64_t>(commit_pairs, 2) *
                   slot_commit_bytes(part.block_size(s));
        l.nvm_slot_bytes_resident = bytes;
        break;
      }
      case RecoveryMode::nvm_prd:
        l.nvm_resident_values = commit_pairs >= 1 ? 2 * n : 0;
        l.nvm_slot_bytes_resident =
            std::min<std::uint64_t>(commit_pairs, 2) *
            (rma::SlotHeader::kSize + prd_window_bytes(part));
        break;
    }
  }
  return l;
}

ExperimentSpec ExperimentSpec::load(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) raise(ErrorCode::io_failure, "cannot open " + json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::invalid_config, std::string("bad spec JSON: ") + e.what());
  }
  ExperimentSpec spec;
  try {
    if (j.contains("grid")) {
      spec.nx = j["grid"].at(0);
      spec.ny = j["grid"].at(1);
      spec.nz = j["grid"].at(2);
    }
    if (j.contains("procs")) spec.procs = j["procs"].get<std::vector<int>>();
    if (j.contains("backends")) {
      spec.backends.clear();
      for (const auto& b : j["backends"])
        spec.backends.push_back(
            recovery_mode_from_string(b.get<std::string>()));
    }
    spec.c = j.value("c", spec.c);
    spec.persist_period = j.value("persist_period", spec.persist_period);
    spec.tol = j.value("tol", spec.tol);
    spec.max_iter = j.value("max_iter", spec.max_iter);
    if (j.contains("seeds"))
      spec.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    spec.fault = j.value("fault", spec.fault);
    spec.slots_per_node = j.value("slots_per_node", spec.slots_per_node);
    spec.mv_bytes = j.value("mv_bytes", spec.mv_bytes);
    spec.mnv_bytes = j.value("mnv_bytes", spec.mnv_bytes);
    spec.out = j.value("out", spec.out);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::invalid_config, std::string("bad spec field: ") + e.what());
  }
  return spec;
}

std::filesystem::path run_experiments(const ExperimentSpec& spec,
                                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto a = linalg::gen_poisson_7pt(spec.nx, spec.ny, spec.nz);

  std::ostringstream csv;
  csv << "backend,proc,c,n,iter_converge,persist_simtime,wire_bytes,"
         "ram_red_bytes,nvm_resident_bytes,nvm_written_bytes,recovered,"
         "status\n";

  for (RecoveryMode mode : spec.backends)
    for (int proc : spec.procs)
      for (std::uint64_t seed : spec.seeds) {
        auto row_prefix = [&](std::ostream& os) {
          os << to_string(mode) << ',' << proc << ',' << spec.c << ','
             << a.n_rows << ',';
        };
        if (spec.c >= proc || proc < 1 ||
            proc > static_cast<int>(a.n_rows)) {
          row_prefix(csv);
          csv << "0,0,0,0,0,0,0,skipped:infeasible combination\n";
          continue;
        }
        pcg::SolveConfig sc;
        sc.tol = spec.tol;
        sc.max_iter = spec.max_iter;
        sc.persist_period = spec.persist_period;
        sc.recovery_mode = mode;
        sc.c = spec.c;
        cluster::ClusterConfig cc;
        cc.proc = proc;
        cc.slots_per_node = spec.slots_per_node;
        cc.nodes = (proc + spec.slots_per_node - 1) / spec.slots_per_node + 1;
        cc.seed = seed;
        cc.mv_bytes = spec.mv_bytes;
        cc.mnv_bytes = spec.mnv_bytes;
        std::ostringstream store;
        store << "store_" << to_string(mode) << '_' << proc << '_' << seed;
        cc.storage_dir = out_dir / store.str();

        try {
          cluster::FaultPlan plan;
          if (!spec.fault.empty() && mode != RecoveryMode::none)
            plan = cluster::parse_fault_plan(spec.fault);
          std::vector<double> b(a.n_rows, 1.0);
          cluster::Simulator sim(cc, sc, a, std::move(b),
                                 linalg::PreconditionerKind::jacobi);
          auto rep = sim.simulate(plan);
          row_prefix(csv);
          csv << rep.iterations << ',' << rep.ledger.persist_simtime_total
              << ',' << rep.ledger.wire_bytes_total() << ','
              << 8 * rep.ledger.ram_redundancy_values << ','
              << 8 * rep.ledger.nvm_resident_values << ','
              << 8 * rep.ledger.nvm_written_values_total << ','
              << rep.recoveries.size() << ',' << to_string(rep.status)
              << '\n';
        } catch (const Error& e) {
          row_prefix(csv);
          csv << "0,0,0,0,0,0,0,skipped:" << error_code_name(e.code())
              << '\n';
        }
      }

  const auto path = out_dir / spec.out;
  std::ofstream out(path);
  if (!out) raise(ErrorCode::io_failure, "cannot write " + path.string());
  out << csv.str();
  return path;
}

}  // namespace bench
}  // namespace esrsim
