// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include "doctest.h"
#include "esrsim/cluster.hpp"
#include "esrsim/error.hpp"
#include "esrsim/poisson.hpp"
#include "esrsim/reconstruct.hpp"
#include "esrsim/redundancy.hpp"
#include "esrsim/vecops.hpp"

using namespace esrsim;
using namespace esrsim::esr;
using namespace esrsim::linalg;

namespace {

// Crash-free reference run with full state capture; the oracle every
// reconstruction result is compared against.
cluster::RunReport reference_run(const CsrMatrix& a, int proc,
                                 std::uint64_t period, int c,
                                 RecoveryMode mode) {
  pcg::SolveConfig sc;
  sc.tol = 1e-8;
  sc.max_iter = 400;
  sc.persist_period = period;
  sc.recovery_mode = mode;
  sc.c = c;
  cluster::ClusterConfig cc;
  cc.proc = proc;
  cc.nodes = proc;
  cc.slots_per_node = 2;
  cc.storage_dir = std::filesystem::temp_directory_path() / "esrsim_esr_ref";
  cluster::Simulator sim(cc, sc, a, std::vector<double>(a.n_rows, 1.0),
                         PreconditionerKind::jacobi);
  return sim.simulate({}, /*capture_state_trace=*/true);
}

RecoveryRecord record_from_trace(const cluster::RunReport& ref,
                                 const Partition& part, int owner,
                                 std::uint64_t j) {
  const auto& prev = ref.state_trace.at(j - 1).at(owner);
  const auto& curr = ref.state_trace.at(j).at(owner);
  RecoveryRecord rec;
  rec.owner = owner;
  rec.j = j;
  rec.beta_prev = curr.beta_prev;
  rec.p_prev = prev.p;
  rec.p_curr = curr.p;
  rec.seal();
  REQUIRE(rec.p_curr.size() ==
          static_cast<std::size_t>(part.block_size(owner)));
  return rec;
}

double rel_inf_diff(std::span<const double> got, std::span<const double> ref) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    err = std::max(err, std::abs(got[i] - ref[i]));
    scale = std::max(scale, std::abs(ref[i]));
  }
  return err / std::max(scale, 1e-300);
}

}  // namespace

TEST_CASE("holder placement: cyclic successors, self only at full FT") {
  CHECK(holder_placement(0, 4, 1) == std::vector<int>{1, 2});
  CHECK(holder_placement(3, 4, 1) == std::vector<int>{0, 1});
  CHECK(holder_placement(2, 8, 0) == std::vector<int>{3});
  // Full fault tolerance: the wrap reaches the owner itself, making
  // exactly c+1 retained copies.
  CHECK(holder_placement(1, 4, 3) == std::vector<int>{2, 3, 0, 1});
  CHECK_THROWS_AS(holder_placement(0, 4, 4), Error);
  CHECK_THROWS_AS(holder_placement(5, 4, 1), Error);
}

TEST_CASE("redundancy store: sliding window of two iterations") {
  RedundancyStore store;
  const std::vector<double> s7{1, 2}, s8{3, 4}, s9{5, 6};
  store.store(0, 7, 0.5, s7);
  CHECK(store.retained(0) == 1);
  CHECK(!store.assemble(0).has_value());  // a single entry is no pair

  store.store(0, 8, 0.25, s8);
  CHECK(store.retained(0) == 2);
  auto rec = store.assemble(0);
  REQUIRE(rec);
  CHECK(rec->j == 8);
  CHECK(rec->beta_prev == 0.25);
  CHECK(rec->p_prev == s7);
  CHECK(rec->p_curr == s8);
  CHECK(rec->checksum_ok());

  store.store(0, 9, 0.125, s9);
  CHECK(store.retained(0) == 2);  // never exceeds two iterations
  CHECK(store.assemble(0)->j == 9);
  CHECK(store.newest_pair_iteration(0) == 9);
  CHECK(store.resident_values() == 4);

  // Overwrite of the same iteration replaces, not grows.
  store.store(0, 9, 0.125, s9);
  CHECK(store.retained(0) == 2);

  // A gap makes the window non-consecutive: no usable pair.
  store.store(1, 3, 0.0, s7);
  store.store(1, 7, 0.0, s8);
  CHECK(!store.assemble(1).has_value());
  CHECK(!store.newest_pair_iteration(1).has_value());
}

TEST_CASE("redundancy store: corrupted entries fail their checksum") {
  RedundancyStore store;
  store.store(2, 5, 0.5, std::vector<double>{1, 2, 3});
  store.store(2, 6, 0.5, std::vector<double>{4, 5, 6});
  for (std::size_t byte = 0; byte < 3 * sizeof(double); byte += 3) {
    RedundancyStore copy = store;
    copy.corrupt_for_test(2, 1, byte);
    CHECK_THROWS_AS(copy.assemble(2), Error);
  }
}

TEST_CASE("recovery record: flipping any byte breaks validation") {
  RecoveryRecord rec;
  rec.owner = 3;
  rec.j = 17;
  rec.beta_prev = 0.7351;
  for (int i = 0; i < 8; ++i) {
    rec.p_prev.push_back(1.0 + i);
    rec.p_curr.push_back(-2.0 - i);
  }
  rec.seal();
  const auto bytes = rec.serialize();
  CHECK(RecoveryRecord::deserialize(bytes).checksum_ok());

  for (std::size_t pos = 0; pos < bytes.size(); ++pos) {
    auto mutated = bytes;
    mutated[pos] ^= 0x01;
    CHECK_THROWS_AS(RecoveryRecord::deserialize(mutated), Error);
  }
}

TEST_CASE("reconstruct: diagonal system collapses to direct formulas") {
  // Identity A and P: r_f = z_f and x_f = b_f - r_f entrywise.
  const auto a = CsrMatrix::identity(4);
  const Partition part{4, 2};
  const auto p = Preconditioner::identity();
  const std::vector<double> b{4, 3, 2, 1};

  RecoveryRecord rec;
  rec.owner = 1;
  rec.j = 6;
  rec.beta_prev = 0.5;
  rec.p_prev = {0.2, 0.4};
  rec.p_curr = {1.0, 2.0};
  rec.seal();

  SurvivorView view;
  view.x = {7.0, 8.0, 0.0, 0.0};
  view.r = {0.1, 0.2, 0.0, 0.0};

  const auto out = reconstruct(a, p, b, part, {1},
                               {{1, rec}}, view, /*c=*/1);
  const auto& s = out.at(1);
  for (int i = 0; i < 2; ++i) {
    const double z = rec.p_curr[i] - rec.beta_prev * rec.p_prev[i];
    CHECK(s.z[i] == z);
    CHECK(s.r[i] == z);                    // identity preconditioner
    CHECK(s.x[i] == doctest::Approx(b[2 + i] - z).epsilon(1e-15));
    CHECK(s.p[i] == rec.p_curr[i]);
  }
}

TEST_CASE("reconstruct: single failure matches the crash-free reference") {
  const auto a = gen_poisson_7pt(8, 8, 8);
  const int proc = 8;
  const Partition part{a.n_rows, proc};
  const auto ref = reference_run(a, proc, 1, 1, RecoveryMode::esr_inmem);
  REQUIRE(ref.status == cluster::RunStatus::converged);
  const std::uint64_t j = 7;
  const int failed = 3;

  SurvivorView view;
  view.x.assign(a.n_rows, 0.0);
  view.r.assign(a.n_rows, 0.0);
  const auto& states = ref.state_trace.at(j);
  for (int s = 0; s < proc; ++s) {
    if (s == failed) continue;
    std::copy(states[s].x.begin(), states[s].x.end(),
              view.x.begin() + part.block_begin(s));
    std::copy(states[s].r.begin(), states[s].r.end(),
              view.r.begin() + part.block_begin(s));
  }

  std::map<int, RecoveryRecord> records;
  records.emplace(failed, record_from_trace(ref, part, failed, j));
  const auto p = Preconditioner::jacobi(a);
  const std::vector<double> b(a.n_rows, 1.0);
  const auto out = reconstruct(a, p, b, part, {failed}, records, view, 1);

  const auto& got = out.at(failed);
  const auto& want = states[failed];
  CHECK(rel_inf_diff(got.x, want.x) <= 1e-10);
  CHECK(rel_inf_diff(got.r, want.r) <= 1e-10);
  CHECK(rel_inf_diff(got.z, want.z) <= 1e-10);
  CHECK(got.p == want.p);  // p comes straight from the record
}

TEST_CASE("reconstruct: two simultaneous failures over the joint block") {
  const auto a = gen_poisson_7pt(8, 8, 8);
  const int proc = 8;
  const Partition part{a.n_rows, proc};
  const auto ref = reference_run(a, proc, 1, 2, RecoveryMode::esr_inmem);
  const std::uint64_t j = 9;
  const std::vector<int> failed{2, 5};

  SurvivorView view;
  view.x.assign(a.n_rows, 0.0);
  view.r.assign(a.n_rows, 0.0);
  const auto& states = ref.state_trace.at(j);
  for (int s = 0; s < proc; ++s) {
    if (s == failed[0] || s == failed[1]) continue;
    std::copy(states[s].x.begin(), states[s].x.end(),
              view.x.begin() + part.block_begin(s));
    std::copy(states[s].r.begin(), states[s].r.end(),
              view.r.begin() + part.block_begin(s));
  }
  std::map<int, RecoveryRecord> records;
  for (int f : failed)
    records.emplace(f, record_from_trace(ref, part, f, j));

  const auto p = Preconditioner::jacobi(a);
  const std::vector<double> b(a.n_rows, 1.0);
  const auto out = reconstruct(a, p, b, part, failed, records, view, 2);
  for (int f : failed) {
    CHECK(rel_inf_diff(out.at(f).x, states[f].x) <= 1e-10);
    CHECK(rel_inf_diff(out.at(f).r, states[f].r) <= 1e-10);
    CHECK(rel_inf_diff(out.at(f).z, states[f].z) <= 1e-10);
  }
}

TEST_CASE("reconstruct: error taxonomy") {
  const auto a = gen_poisson_7pt(4, 1, 1);
  const Partition part{4, 2};
  const auto p = Preconditioner::jacobi(a);
  const std::vector<double> b{1, 1, 1, 1};
  SurvivorView view;
  view.x.assign(4, 0.0);
  view.r.assign(4, 0.0);

  auto make = [&](int owner, std::uint64_t j) {
    RecoveryRecord rec;
    rec.owner = owner;
    rec.j = j;
    rec.beta_prev = 0.5;
    rec.p_prev = {0.1, 0.2};
    rec.p_curr = {0.3, 0.4};
    rec.seal();
    return rec;
  };

  // More failures than the tolerance c.
  std::map<int, RecoveryRecord> two{{0, make(0, 5)}, {1, make(1, 5)}};
  CHECK_THROWS_AS(reconstruct(a, p, b, part, {0, 1}, two, view, 1), Error);

  // Mismatched iterations across records.
  std::map<int, RecoveryRecord> stale{{0, make(0, 5)}, {1, make(1, 6)}};
  try {
    reconstruct(a, p, b, part, {0, 1}, stale, view, 2);
    FAIL("expected stale_record");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::stale_record);
  }

  // Corrupt record.
  auto bad = make(0, 5);
  bad.p_curr[0] = 99.0;  // payload changed after seal()
  std::map<int, RecoveryRecord> corrupt{{0, bad}};
  try {
    reconstruct(a, p, b, part, {0}, corrupt, view, 1);
    FAIL("expected corrupt_record");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::corrupt_record);
  }

  // Missing record.
  std::map<int, RecoveryRecord> none;
  try {
    reconstruct(a, p, b, part, {0}, none, view, 1);
    FAIL("expected cold_start");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cold_start);
  }
}

TEST_CASE("peer wire rate: holder copies minus halo rides") {
  // Block-diagonal structure (identity): no halo, no discount.
  const auto id = CsrMatrix::identity(400);
  const Partition part{400, 4};
  cluster::HaloPlan no_halo(id, part);
  CHECK(no_halo.total_values_per_exchange() == 0);
  // Full fault tolerance: 3 shipped copies of 100 entries per owner.
  CHECK(peer_redundancy_wire_rate(part, 3, &no_halo) == 1200);
  CHECK(peer_redundancy_wire_rate(part, 1, &no_halo) == 800);

  // Coupled structure: the halo overlap is subtracted once per holder.
  const auto chain = gen_poisson_7pt(400, 1, 1);
  cluster::HaloPlan halo(chain, part);
  const std::uint64_t discount = [&] {
    std::uint64_t d = 0;
    for (int owner = 0; owner < 4; ++owner)
      for (int h : holder_placement(owner, 4, 3))
        if (h != owner) d += halo.overlap(owner, h);
    return d;
  }();
  CHECK(discount > 0);
  CHECK(peer_redundancy_wire_rate(part, 3, &halo) == 1200 - discount);
}
