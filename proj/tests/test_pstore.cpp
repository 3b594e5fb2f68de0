// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include "doctest.h"
#include "esrsim/error.hpp"
#include "esrsim/pstore.hpp"

using namespace esrsim;
using namespace esrsim::pstore;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("esrsim_pstore_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

esr::RecoveryRecord make_record(int owner, std::uint64_t j,
                                std::size_t slice_len, double scale = 1.0) {
  esr::RecoveryRecord rec;
  rec.owner = owner;
  rec.j = j;
  rec.beta_prev = 0.5 * scale;
  for (std::size_t i = 0; i < slice_len; ++i) {
    rec.p_prev.push_back(scale * (i + 1));
    rec.p_curr.push_back(-scale * (i + 1));
  }
  rec.seal();
  return rec;
}

bool same_record(const esr::RecoveryRecord& a, const esr::RecoveryRecord& b) {
  return a.serialize() == b.serialize();
}

struct BackendSet {
  linalg::Partition part;
  CostModel costs;
  OverheadLedger ledger;
  pcg::ClockSet clocks;
  std::unique_ptr<Backend> backend;

  BackendSet(RecoveryMode mode, std::int64_t n, int proc, int c,
             const fs::path& dir)
      : part{n, proc}, clocks(proc) {
    backend = make_backend(mode, part, c, nullptr, dir, &ledger, &clocks,
                           costs);
  }
};

// Drives the hook the way the solver does: persist p^(j) with
// beta^(j-1) at iteration j.
void drive_hook(Backend& b, const linalg::Partition& part, std::uint64_t j,
                bool close, double scale) {
  for (int rank = 0; rank < part.proc; ++rank) {
    std::vector<double> slice(part.block_size(rank));
    for (std::size_t i = 0; i < slice.size(); ++i)
      slice[i] = scale * (rank + 1) + static_cast<double>(i);
    b.on_persist(j, close, rank, slice, 0.25 * scale);
  }
  b.on_persist_phase_done(j, close);
}

}  // namespace

TEST_CASE("fetch o persist is the identity on records, all backends") {
  for (RecoveryMode mode : {RecoveryMode::esr_inmem, RecoveryMode::nvm_local,
                            RecoveryMode::nvm_prd}) {
    CAPTURE(to_string(mode));
    BackendSet s(mode, 16, 4, 2, fresh_dir(std::string("rt_") + to_string(mode)));
    const auto rec = make_record(1, 6, 4);
    s.backend->persist_record(rec);
    const auto back = s.backend->fetch(1, 0);
    CHECK(back.owner == rec.owner);
    CHECK(back.j == rec.j);
    CHECK(back.beta_prev == rec.beta_prev);
    CHECK(back.p_prev == rec.p_prev);
    CHECK(back.p_curr == rec.p_curr);
    CHECK(back.checksum_ok());
    if (mode != RecoveryMode::esr_inmem) CHECK(same_record(back, rec));
  }
}

TEST_CASE("fetch before any persist is a cold start") {
  for (RecoveryMode mode : {RecoveryMode::esr_inmem, RecoveryMode::nvm_local,
                            RecoveryMode::nvm_prd}) {
    BackendSet s(mode, 16, 4, 1, fresh_dir(std::string("cold_") + to_string(mode)));
    try {
      s.backend->fetch(2, 0);
      FAIL("expected cold_start");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::cold_start);
    }
    CHECK(s.backend->available_iterations(2).empty());
  }
}

TEST_CASE("persisting the same iteration twice overwrites idempotently") {
  for (RecoveryMode mode : {RecoveryMode::nvm_local, RecoveryMode::nvm_prd}) {
    BackendSet s(mode, 16, 4, 1, fresh_dir(std::string("idem_") + to_string(mode)));
    const auto rec = make_record(2, 8, 4, 1.0);
    s.backend->persist_record(rec);
    const auto commits_before = s.ledger.nvm_commits_total;
    s.backend->persist_record(rec);  // same iteration again
    CHECK(s.ledger.nvm_commits_total == commits_before + 1);
    CHECK(same_record(s.backend->fetch(2, 0), rec));
  }
}

TEST_CASE("crash mid-persist falls back to the previous record") {
  for (RecoveryMode mode : {RecoveryMode::nvm_local, RecoveryMode::nvm_prd}) {
    CAPTURE(to_string(mode));
    BackendSet s(mode, 16, 4, 1, fresh_dir(std::string("cut_") + to_string(mode)));
    const auto rec1 = make_record(1, 6, 4, 1.0);
    const auto rec2 = make_record(1, 11, 4, 2.0);
    s.backend->persist_record(rec1);
    for (std::size_t cut : {std::size_t(0), std::size_t(17), std::size_t(90)}) {
      s.backend->persist_record(rec2, cut);
      CHECK(same_record(s.backend->fetch(1, 0), rec1));
      const auto at = s.backend->fetch_at(1, 6, 0);
      REQUIRE(at.has_value());
      CHECK(same_record(*at, rec1));
      CHECK(!s.backend->fetch_at(1, 11, 0).has_value());
    }
    s.backend->persist_record(rec2);  // full write now succeeds
    CHECK(same_record(s.backend->fetch(1, 0), rec2));
  }
}

TEST_CASE("peer RAM: c+1 copies at the cyclically-next stores") {
  BackendSet s(RecoveryMode::esr_inmem, 16, 4, 1, fresh_dir("peer_copies"));
  auto* peer = dynamic_cast<PeerRamBackend*>(s.backend.get());
  REQUIRE(peer);
  const auto rec = make_record(0, 6, 4);
  s.backend->persist_record(rec);
  // c=1: the record is resident at exactly two stores (ranks 1 and 2).
  CHECK(peer->store_of(1).retained(0) == 2);
  CHECK(peer->store_of(2).retained(0) == 2);
  CHECK(peer->store_of(3).retained(0) == 0);
  CHECK(peer->store_of(0).retained(0) == 0);  // no self copy below full FT
}

TEST_CASE("peer RAM: fetch survives holder deaths, errors at zero holders") {
  BackendSet s(RecoveryMode::esr_inmem, 16, 4, 1, fresh_dir("peer_death"));
  std::vector<char> alive(4, 1);
  s.backend->set_liveness([&](int r) { return alive[r] != 0; });
  const auto rec = make_record(0, 6, 4);
  s.backend->persist_record(rec);

  alive[1] = 0;  // one of the two holders dies
  s.backend->on_rank_down(1);
  CHECK(same_record(s.backend->fetch(0, 3), rec));

  alive[2] = 0;  // the last holder dies
  s.backend->on_rank_down(2);
  try {
    s.backend->fetch(0, 3);
    FAIL("expected cold_start");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cold_start);
  }

  // Persisting with every holder dead is an error, not a silent no-op.
  try {
    s.backend->persist_record(rec);
    FAIL("expected backend_unavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::backend_unavailable);
  }
  CHECK(s.backend->degraded_warnings() > 0);
}

TEST_CASE("local slots: unreachable while the owner is down") {
  BackendSet s(RecoveryMode::nvm_local, 16, 4, 1, fresh_dir("local_down"));
  const auto rec = make_record(2, 6, 4);
  s.backend->persist_record(rec);
  s.backend->on_rank_down(2);
  try {
    s.backend->fetch(2, 0);
    FAIL("expected backend_unavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::backend_unavailable);
  }
  CHECK(s.backend->available_iterations(2).empty());
  // Node recovery restores access; generations survived on the medium.
  s.backend->on_rank_up(2);
  CHECK(same_record(s.backend->fetch(2, 2), rec));
  CHECK(s.backend->available_iterations(2) ==
        std::vector<std::uint64_t>{6});
}

TEST_CASE("hook pairing: one record per pair, staged at the opener") {
  for (RecoveryMode mode : {RecoveryMode::nvm_local, RecoveryMode::nvm_prd}) {
    CAPTURE(to_string(mode));
    BackendSet s(mode, 16, 4, 1, fresh_dir(std::string("pair_") + to_string(mode)));
    drive_hook(*s.backend, s.part, 5, false, 5.0);  // pair opener stages
    CHECK(s.backend->available_iterations(0).empty());
    drive_hook(*s.backend, s.part, 6, true, 6.0);   // pair close commits
    const auto avail = s.backend->available_iterations(0);
    CHECK(avail == std::vector<std::uint64_t>{6});
    const auto rec = s.backend->fetch(0, 0);
    CHECK(rec.j == 6);
    CHECK(rec.beta_prev == 0.25 * 6.0);
    // p_prev is the opener's slice, p_curr the closer's.
    CHECK(rec.p_prev[0] == 5.0 * 1.0);
    CHECK(rec.p_curr[0] == 6.0 * 1.0);

    // Single-copy counter: one slice per rank per member, n values
    // per persistence iteration system-wide.
    CHECK(s.ledger.nvm_written_values_total == 2 * 16);

    // Next pair: the sliding slot pair now holds both records.
    drive_hook(*s.backend, s.part, 10, false, 10.0);
    drive_hook(*s.backend, s.part, 11, true, 11.0);
    CHECK(s.backend->available_iterations(0) ==
          std::vector<std::uint64_t>{6, 11});
    // And a third pair evicts the oldest.
    drive_hook(*s.backend, s.part, 15, false, 15.0);
    drive_hook(*s.backend, s.part, 16, true, 16.0);
    CHECK(s.backend->available_iterations(0) ==
          std::vector<std::uint64_t>{11, 16});
  }
}

TEST_CASE("hook pairing: period-1 cadence commits every iteration") {
  BackendSet s(RecoveryMode::nvm_local, 16, 2, 1, fresh_dir("pair_p1"));
  drive_hook(*s.backend, s.part, 1, false, 1.0);
  for (std::uint64_t j = 2; j <= 4; ++j)
    drive_hook(*s.backend, s.part, j, true, static_cast<double>(j));
  CHECK(s.backend->available_iterations(0) ==
        std::vector<std::uint64_t>{3, 4});
  CHECK(s.ledger.nvm_commits_total == 3 * 2);  // three pairs, two ranks
}

TEST_CASE("prd window: single-copy and physical write accounting") {
  // n=1000, proc=4: each rank persists a 250-value slice per
  // persistence iteration; one alternating-slot commit per pair.
  BackendSet s(RecoveryMode::nvm_prd, 1000, 4, 1, fresh_dir("prd_acct"));
  drive_hook(*s.backend, s.part, 5, false, 1.0);
  drive_hook(*s.backend, s.part, 6, true, 2.0);

  CHECK(s.ledger.nvm_written_values_total == 2 * 1000);  // n per member
  // Physical bytes: window image (4 records of 36 + 16*250 bytes) plus
  // one 42-byte slot header.
  const std::uint64_t window_bytes = 4 * (36 + 16 * 250);
  CHECK(s.ledger.nvm_bytes_written_total ==
        window_bytes + rma::SlotHeader::kSize);
  CHECK(s.ledger.nvm_commits_total == 1);
  // Wire: each rank shipped its full record (both slices) once per pair.
  CHECK(s.ledger.wire_redundancy_values_total == 2 * 1000);

  OverheadLedger residency;
  s.backend->fill_residency(residency);
  CHECK(residency.nvm_resident_values == 2 * 1000);
  CHECK(residency.ram_redundancy_values == 0);
}

TEST_CASE("prd window: origins do not wait for the target persist") {
  BackendSet s(RecoveryMode::nvm_prd, 64, 4, 1, fresh_dir("prd_time"));
  s.costs.persist_latency = 1'000'000;
  // Rebuild with the expensive persist model.
  s.backend = make_backend(RecoveryMode::nvm_prd, s.part, 1, nullptr,
                           fresh_dir("prd_time2"), &s.ledger, &s.clocks,
                           s.costs);
  drive_hook(*s.backend, s.part, 5, false, 1.0);
  drive_hook(*s.backend, s.part, 6, true, 2.0);
  // Compute clocks advanced only by their put costs, far below the
  // persist latency the PRD clock absorbed.
  for (int r = 0; r < 4; ++r) CHECK(s.clocks.t[r] < 1'000'000);
  CHECK(s.clocks.prd >= 1'000'000);
}

TEST_CASE("peer RAM residency: steady state is 2n(c+1) values") {
  const std::int64_t n = 400;
  BackendSet s(RecoveryMode::esr_inmem, n, 4, 3, fresh_dir("peer_res"));
  drive_hook(*s.backend, s.part, 5, false, 1.0);
  OverheadLedger after_one;
  s.backend->fill_residency(after_one);
  CHECK(after_one.ram_redundancy_values == 400 * 4);  // n*(c+1), one member

  drive_hook(*s.backend, s.part, 6, true, 2.0);
  OverheadLedger after_pair;
  s.backend->fill_residency(after_pair);
  // Full fault tolerance: 2*n*(c+1) = 2*proc*n retained values.
  CHECK(after_pair.ram_redundancy_values == 2 * 400 * 4);
  CHECK(after_pair.ram_redundancy_values == 2 * 4 * 400);

  // Holder-resident copies (excluding the owner's self copy): 3 shipped
  // copies of 100 entries per owner and iteration.
  auto* peer = dynamic_cast<PeerRamBackend*>(s.backend.get());
  std::uint64_t holder_values = 0;
  for (int h = 0; h < 4; ++h)
    for (int owner = 0; owner < 4; ++owner)
      if (owner != h)
        holder_values += peer->store_of(h).retained(owner) *
                         s.part.block_size(owner);
  CHECK(holder_values == 2 * 1200);  // two iterations retained
}
