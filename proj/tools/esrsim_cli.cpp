// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "esrsim/bench.hpp"
#include "esrsim/error.hpp"
#include "esrsim/matrix_io.hpp"
#include "esrsim/poisson.hpp"

namespace {

using namespace esrsim;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::invalid_config:
      return 3;
    default:
      return 2;
  }
}

int run_gen(std::int64_t nx, std::int64_t ny, std::int64_t nz,
            const std::string& out) {
  const auto a = linalg::gen_poisson_7pt(nx, ny, nz);
  linalg::write_csr(out, a);
  std::printf("wrote %s: n=%lld nnz=%lld\n", out.c_str(),
              static_cast<long long>(a.n_rows),
              static_cast<long long>(a.nnz()));
  return 0;
}

struct SolveArgs {
  std::string matrix;
  std::vector<std::int64_t> poisson;
  std::string backend = "none";
  int proc = 2;
  int c = 0;
  std::uint64_t period = 1;
  double tol = 1e-8;
  std::uint64_t max_iter = 1000;
  std::uint64_t seed = 0;
  std::string fault;
  std::string precond = "jacobi";
  std::uint64_t mv = 0, mnv = 0;
  int nodes = 0, slots = 2;
  std::string store = ".esrsim_store";
  std::string report_path;
  std::string x_out;
};

int run_solve(const SolveArgs& args) {
  linalg::CsrMatrix a;
  if (!args.matrix.empty()) {
    a = linalg::read_csr(args.matrix);
  } else if (args.poisson.size() == 3) {
    a = linalg::gen_poisson_7pt(args.poisson[0], args.poisson[1],
                                args.poisson[2]);
  } else {
    raise(ErrorCode::invalid_config, "need --matrix or --poisson nx ny nz");
  }

  pcg::SolveConfig sc;
  sc.tol = args.tol;
  sc.max_iter = args.max_iter;
  sc.persist_period = args.period;
  sc.recovery_mode = recovery_mode_from_string(args.backend);
  sc.c = args.c;

  cluster::ClusterConfig cc;
  cc.proc = args.proc;
  cc.slots_per_node = args.slots;
  cc.nodes = args.nodes > 0
                 ? args.nodes
                 : (args.proc + args.slots - 1) / args.slots + 1;
  cc.seed = args.seed;
  cc.mv_bytes = args.mv;
  cc.mnv_bytes = args.mnv;
  cc.storage_dir = args.store;

  cluster::FaultPlan plan = cluster::parse_fault_plan(args.fault);
  std::vector<double> b(a.n_rows, 1.0);
  cluster::Simulator sim(cc, sc, a, std::move(b),
                         args.precond == "identity"
                             ? linalg::PreconditionerKind::identity
                             : linalg::PreconditionerKind::jacobi);
  const auto rep = sim.simulate(plan);

  const std::string serialized = rep.serialize();
  if (args.report_path.empty()) {
    std::cout << serialized;
  } else {
    std::ofstream out(args.report_path);
    out << serialized;
  }
  if (!args.x_out.empty()) {
    std::ofstream out(args.x_out);
    for (double v : rep.final_x) out << cluster::hex_double(v) << '\n';
  }
  std::cout << "status=" << to_string(rep.status)
            << " iterations=" << rep.iterations
            << " recoveries=" << rep.recoveries.size() << '\n'
            << rep.ledger.pretty() << '\n';
  switch (rep.status) {
    case cluster::RunStatus::converged:
    case cluster::RunStatus::max_iter:
      return 0;
    default:
      return 2;
  }
}

int run_account(std::uint64_t n, double s, int proc, int c,
                const std::string& mode, std::uint64_t period) {
  bench::AccountQuery q;
  q.n = n;
  q.sparsity = s;
  q.proc = proc;
  q.c = c;
  q.mode = recovery_mode_from_string(mode);
  q.persist_period = period;
  const auto l = bench::account(q);
  std::cout << l.pretty() << '\n';
  if (q.mode == RecoveryMode::nvm_local || q.mode == RecoveryMode::nvm_prd)
    std::printf("single-copy NVRAM per persistence iteration: %.6g GB\n",
                bench::single_copy_nvram_gb(n));
  std::puts(
      "note: accounting follows the closed-form memory model; time "
      "figures are simulated units, never wall-clock comparisons");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "esrsim: exact state reconstruction sandbox for a distributed PCG "
      "solver with in-memory and persistent recovery backends"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a 3-D Poisson 7-point system");
  std::int64_t nx = 8, ny = 8, nz = 8;
  std::string gen_out = "poisson.csr";
  gen->add_option("nx", nx)->required();
  gen->add_option("ny", ny)->required();
  gen->add_option("nz", nz)->required();
  gen->add_option("out", gen_out)->required();

  // solve
  auto* solve = app.add_subcommand("solve", "run the simulated cluster solve");
  SolveArgs sa;
  solve->add_option("--matrix", sa.matrix, "esrsim-csr input file");
  solve->add_option("--poisson", sa.poisson, "nx ny nz grid dims")
      ->expected(3);
  solve->add_option("--backend", sa.backend,
                    "none|esr_inmem|nvm_local|nvm_prd");
  solve->add_option("--proc", sa.proc, "compute ranks");
  solve->add_option("--c", sa.c, "simultaneous failures tolerated");
  solve->add_option("--period", sa.period, "persistence period");
  solve->add_option("--tol", sa.tol, "relative residual threshold");
  solve->add_option("--max-iter", sa.max_iter);
  solve->add_option("--seed", sa.seed);
  solve->add_option("--fault", sa.fault,
                    "fault plan \"j:phase:ranks[;...]\", phase compute or "
                    "mid_persist@cut");
  solve->add_option("--precond", sa.precond, "jacobi|identity");
  solve->add_option("--mv", sa.mv, "volatile capacity in bytes (0 unbounded)");
  solve->add_option("--mnv", sa.mnv, "non-volatile capacity in bytes");
  solve->add_option("--nodes", sa.nodes, "compute nodes (0 = auto)");
  solve->add_option("--slots", sa.slots, "slots per node");
  solve->add_option("--store", sa.store, "durable slot directory");
  solve->add_option("--report", sa.report_path, "write the run log here");
  solve->add_option("--x-out", sa.x_out, "write the solution (hex floats)");

  // account
  auto* account = app.add_subcommand(
      "account", "closed-form memory/traffic accounting (no solve)");
  std::uint64_t acc_n = 0, acc_period = 1;
  double acc_s = 7.0;
  int acc_proc = 1, acc_c = 0;
  std::string acc_mode = "nvm_prd";
  account->add_option("--n", acc_n, "global vector size")->required();
  account->add_option("--s", acc_s, "average nonzeros per row");
  account->add_option("--proc", acc_proc)->required();
  account->add_option("--c", acc_c);
  account->add_option("--mode", acc_mode);
  account->add_option("--period", acc_period);

  // bench
  auto* benchcmd =
      app.add_subcommand("bench", "run an experiment matrix, emit CSV");
  std::string spec_path, bench_out = "bench_out";
  benchcmd->add_option("--spec", spec_path, "ExperimentSpec JSON")->required();
  benchcmd->add_option("--out", bench_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(nx, ny, nz, gen_out);
    if (solve->parsed()) return run_solve(sa);
    if (account->parsed())
      return run_account(acc_n, acc_s, acc_proc, acc_c, acc_mode, acc_period);
    if (benchcmd->parsed()) {
      const auto spec = esrsim::bench::ExperimentSpec::load(spec_path);
      const auto csv = esrsim::bench::run_experiments(spec, bench_out);
      std::printf("wrote %s (simulated units)\n", csv.string().c_str());
      return 0;
    }
  } catch (const esrsim::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
