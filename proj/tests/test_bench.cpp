// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "esrsim/bench.hpp"
#include "esrsim/error.hpp"
#include "esrsim/poisson.hpp"

using namespace esrsim;
using namespace esrsim::bench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("esrsim_bench_" + tag);
  fs::remove_all(dir);
  return dir;
}

cluster::RunReport run_sim(const linalg::CsrMatrix& a, int proc,
                           RecoveryMode mode, std::uint64_t period, int c,
                           const std::string& tag,
                           const std::string& fault = "") {
  pcg::SolveConfig sc;
  sc.tol = 1e-8;
  sc.max_iter = 500;
  sc.persist_period = period;
  sc.recovery_mode = mode;
  sc.c = c;
  cluster::ClusterConfig cc;
  cc.proc = proc;
  cc.slots_per_node = 2;
  cc.nodes = (proc + 1) / 2 + 1;
  cc.storage_dir = fresh_dir(tag);
  cluster::Simulator sim(cc, sc, a, std::vector<double>(a.n_rows, 1.0),
                         linalg::PreconditionerKind::jacobi);
  return sim.simulate(cluster::parse_fault_plan(fault));
}

void check_ledgers_equal(const OverheadLedger& analytic,
                         const OverheadLedger& measured,
                         bool include_residency) {
  CHECK(analytic.ram_compute_values == measured.ram_compute_values);
  CHECK(analytic.wire_halo_values_per_iter ==
        measured.wire_halo_values_per_iter);
  CHECK(analytic.wire_redundancy_values_per_persist ==
        measured.wire_redundancy_values_per_persist);
  CHECK(analytic.nvm_written_values_per_persist ==
        measured.nvm_written_values_per_persist);
  CHECK(analytic.wire_halo_values_total == measured.wire_halo_values_total);
  CHECK(analytic.wire_redundancy_values_total ==
        measured.wire_redundancy_values_total);
  CHECK(analytic.wire_recovery_values_total ==
        measured.wire_recovery_values_total);
  CHECK(analytic.wire_meta_bytes_total == measured.wire_meta_bytes_total);
  CHECK(analytic.nvm_written_values_total ==
        measured.nvm_written_values_total);
  CHECK(analytic.nvm_bytes_written_total ==
        measured.nvm_bytes_written_total);
  CHECK(analytic.nvm_commits_total == measured.nvm_commits_total);
  if (include_residency) {
    CHECK(analytic.ram_redundancy_values == measured.ram_redundancy_values);
    CHECK(analytic.nvm_resident_values == measured.nvm_resident_values);
    CHECK(analytic.nvm_slot_bytes_resident ==
          measured.nvm_slot_bytes_resident);
  }
}

}  // namespace

TEST_CASE("closed-form accounting: the worked formula examples") {
  // Full fault tolerance, proc=4, n=400: 2*proc*n redundancy values.
  AccountQuery q;
  q.n = 400;
  q.proc = 4;
  q.c = 3;
  q.mode = RecoveryMode::esr_inmem;
  const auto l = account(q);
  CHECK(l.ram_redundancy_values == 2 * 4 * 400);
  CHECK(l.ram_redundancy_values == 3200);
  // Shipped copies stay bounded by proc-1 peers.
  CHECK(l.wire_redundancy_values_per_persist == 3 * 400);

  // No recovery mode: zero overhead.
  q.mode = RecoveryMode::none;
  CHECK(account(q).ram_redundancy_values == 0);

  // NVM: no RAM redundancy, n values per persistence iteration.
  q.mode = RecoveryMode::nvm_prd;
  const auto nvm = account(q);
  CHECK(nvm.ram_redundancy_values == 0);
  CHECK(nvm.nvm_written_values_per_persist == 400);
  CHECK(nvm.nvm_resident_values == 800);
}

TEST_CASE("NVRAM usage scales linearly with the global vector size") {
  // Doubling the global vector size doubles the NVRAM footprint,
  // reaching 2.56 GB at 320 million values.
  const std::vector<std::pair<std::uint64_t, double>> series{
      {5'000'000, 0.04},   {10'000'000, 0.08}, {20'000'000, 0.16},
      {40'000'000, 0.32},  {80'000'000, 0.64}, {160'000'000, 1.28},
      {320'000'000, 2.56},
  };
  for (const auto& [n, gb] : series) {
    CHECK(single_copy_nvram_gb(n) == gb);
    AccountQuery q;
    q.n = n;
    q.proc = 1000;
    q.mode = RecoveryMode::nvm_prd;
    CHECK(account(q).nvm_written_values_per_persist * 8 ==
          static_cast<std::uint64_t>(gb * 1e9));
  }
}

TEST_CASE("exascale extrapolation: RAM petabytes become NVRAM gigabytes") {
  // One million ranks, problem sized so full-FT in-memory redundancy
  // fills 3 PB of RAM; persisted once, the same data is ~3 GB of NVRAM.
  const int proc = 1'000'000;
  const std::uint64_t n = 187'500'000;
  AccountQuery q;
  q.n = n;
  q.proc = proc;
  q.c = proc - 1;
  q.mode = RecoveryMode::esr_inmem;
  const auto inmem = account(q);
  CHECK(8 * inmem.ram_redundancy_values == 3'000'000'000'000'000ull);  // 3 PB

  q.mode = RecoveryMode::nvm_prd;
  const auto nvm = account(q);
  CHECK(8 * nvm.nvm_resident_values == 3'000'000'000ull);  // ~3 GB
  CHECK(nvm.ram_redundancy_values == 0);
}

TEST_CASE("analytic ledger equals the measured ledger, crash-free") {
  const auto a = linalg::gen_poisson_7pt(6, 6, 6);
  const linalg::Partition part{a.n_rows, 4};
  const cluster::HaloPlan halo(a, part);
  for (RecoveryMode mode : {RecoveryMode::none, RecoveryMode::esr_inmem,
                            RecoveryMode::nvm_local, RecoveryMode::nvm_prd}) {
    for (std::uint64_t period : {1ull, 3ull}) {
      CAPTURE(to_string(mode));
      CAPTURE(period);
      const auto rep = run_sim(a, 4, mode, period, 2,
                               std::string("an_") + to_string(mode) +
                                   std::to_string(period));
      REQUIRE(rep.status == cluster::RunStatus::converged);
      pcg::SolveConfig sc;
      sc.persist_period = period;
      sc.recovery_mode = mode;
      sc.c = 2;
      const auto shape = shape_of(rep);
      const auto analytic = account(a, part, sc, &halo, &shape);
      check_ledgers_equal(analytic, rep.ledger, /*include_residency=*/true);
      // Crash-free: one halo exchange per step plus one per residual check.
      CHECK(shape.halo_exchanges == shape.steps + shape.residual_checks);
    }
  }
}

TEST_CASE("analytic ledger equals the measured ledger under faults") {
  const auto a = linalg::gen_poisson_7pt(8, 8, 8);
  const linalg::Partition part{a.n_rows, 4};
  const cluster::HaloPlan halo(a, part);
  struct Case {
    RecoveryMode mode;
    std::uint64_t period;
    const char* fault;
  };
  for (const Case& k :
       {Case{RecoveryMode::esr_inmem, 1, "9:compute:1"},
        Case{RecoveryMode::nvm_prd, 5, "9:compute:2"},
        Case{RecoveryMode::nvm_prd, 1, "9:compute:2"},
        Case{RecoveryMode::nvm_local, 5, "8:compute:3"},
        Case{RecoveryMode::esr_inmem, 1, "12:compute:0,2"}}) {
    CAPTURE(to_string(k.mode));
    CAPTURE(k.fault);
    const auto rep = run_sim(a, 4, k.mode, k.period, 2,
                             std::string("anf_") + to_string(k.mode) +
                                 std::to_string(k.period),
                             k.fault);
    REQUIRE(rep.status == cluster::RunStatus::converged);
    REQUIRE(rep.recoveries.size() == 1);
    pcg::SolveConfig sc;
    sc.persist_period = k.period;
    sc.recovery_mode = k.mode;
    sc.c = 2;
    const auto shape = shape_of(rep);
    const auto analytic = account(a, part, sc, &halo, &shape);
    check_ledgers_equal(analytic, rep.ledger, /*include_residency=*/false);
  }
}

TEST_CASE("trends: in-memory redundancy grows with proc, NVM does not") {
  const std::uint64_t n = 4096;
  std::uint64_t prev_ram = 0, prev_wire = 0;
  for (int proc : {2, 4, 8, 16}) {
    AccountQuery q;
    q.n = n;
    q.proc = proc;
    q.c = proc - 1;  // full fault tolerance
    q.mode = RecoveryMode::esr_inmem;
    const auto inmem = account(q);
    CHECK(inmem.ram_redundancy_values == 2 * n * proc);
    CHECK(inmem.ram_redundancy_values > prev_ram);
    CHECK(inmem.wire_redundancy_values_per_persist > prev_wire);
    prev_ram = inmem.ram_redundancy_values;
    prev_wire = inmem.wire_redundancy_values_per_persist;

    q.mode = RecoveryMode::nvm_prd;
    const auto nvm = account(q);
    CHECK(nvm.nvm_written_values_per_persist == n);   // proc-independent
    CHECK(nvm.nvm_resident_values == 2 * n);
  }
  // The PRD wire rate is also independent of the failure tolerance c.
  for (int c : {0, 1, 2, 3}) {
    AccountQuery q;
    q.n = n;
    q.proc = 8;
    q.c = c;
    q.mode = RecoveryMode::nvm_prd;
    CHECK(account(q).wire_redundancy_values_per_persist == n);
  }
}

TEST_CASE("experiment runner: stable CSV, deterministic reruns") {
  ExperimentSpec spec;
  spec.nx = spec.ny = spec.nz = 6;
  spec.procs = {2, 4};
  spec.backends = {RecoveryMode::none, RecoveryMode::esr_inmem,
                   RecoveryMode::nvm_local, RecoveryMode::nvm_prd};
  spec.c = 1;
  spec.persist_period = 1;
  spec.seeds = {7};
  spec.out = "results.csv";

  const auto dir1 = fresh_dir("csv1");
  const auto path1 = run_experiments(spec, dir1);
  std::stringstream buf1;
  buf1 << std::ifstream(path1).rdbuf();
  const std::string csv1 = buf1.str();

  CHECK(csv1.rfind("backend,proc,c,n,iter_converge,persist_simtime,"
                   "wire_bytes,ram_red_bytes,nvm_resident_bytes,"
                   "nvm_written_bytes,recovered,status\n",
                   0) == 0);
  // 4 backends x 2 procs = 8 data rows.
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 9);

  // Hook inertness: iterations identical across backends per proc.
  std::map<int, std::set<std::string>> iters_by_proc;
  std::istringstream lines(csv1);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream cell_in(line);
    std::string cell;
    while (std::getline(cell_in, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 12);
    CHECK(cells[11] == "converged");
    iters_by_proc[std::stoi(cells[1])].insert(cells[4]);
  }
  for (const auto& [proc, iters] : iters_by_proc) CHECK(iters.size() == 1);

  const auto dir2 = fresh_dir("csv2");
  const auto path2 = run_experiments(spec, dir2);
  std::stringstream buf2;
  buf2 << std::ifstream(path2).rdbuf();
  CHECK(buf2.str() == csv1);  // byte-identical rerun
}

TEST_CASE("experiment runner: infeasible combinations become skipped rows") {
  ExperimentSpec spec;
  spec.nx = spec.ny = spec.nz = 4;
  spec.procs = {2};
  spec.backends = {RecoveryMode::esr_inmem};
  spec.c = 5;  // c >= proc: infeasible
  const auto path = run_experiments(spec, fresh_dir("skip"));
  std::stringstream buf;
  buf << std::ifstream(path).rdbuf();
  CHECK(buf.str().find("skipped:infeasible") != std::string::npos);
}

TEST_CASE("experiment spec loads from JSON") {
  const auto dir = fresh_dir("specjson");
  fs::create_directories(dir);
  const auto path = dir / "spec.json";
  std::ofstream(path) << R"({
    "grid": [6, 5, 4],
    "procs": [2, 4],
    "backends": ["esr_inmem", "nvm_prd"],
    "c": 1,
    "persist_period": 5,
    "tol": 1e-7,
    "max_iter": 300,
    "seeds": [1, 2],
    "fault": "9:compute:1",
    "out": "r.csv"
  })";
  const auto spec = ExperimentSpec::load(path);
  CHECK(spec.nx == 6);
  CHECK(spec.ny == 5);
  CHECK(spec.nz == 4);
  CHECK(spec.procs == std::vector<int>{2, 4});
  REQUIRE(spec.backends.size() == 2);
  CHECK(spec.backends[0] == RecoveryMode::esr_inmem);
  CHECK(spec.backends[1] == RecoveryMode::nvm_prd);
  CHECK(spec.c == 1);
  CHECK(spec.persist_period == 5);
  CHECK(spec.tol == 1e-7);
  CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(spec.fault == "9:compute:1");
  CHECK(spec.out == "r.csv");

  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(ExperimentSpec::load(path), Error);
}
