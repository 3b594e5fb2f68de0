// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>

#include "esrsim/halo.hpp"
#include "esrsim/record.hpp"
#include "esrsim/redundancy.hpp"
#include "esrsim/state.hpp"
#include "esrsim/window.hpp"

namespace esrsim {
namespace pstore {

/// Next-persist fault injection: `victims` die during the persistence
/// phase; `cut` bounds how much of their write survives (bytes of the
/// durable sequence, or delivered copies for peer RAM).
struct CrashInject {
  std::vector<int> victims;
  std::size_t cut = 0;
};

/// Uniform persistence abstraction over the three recovery targets:
/// peer RAM (in-memory redundancy), local durable slot pairs, and the
/// remote persistent-recovery-data window. The solver drives it
/// through the PersistenceHook interface; recovery reads records back
/// through fetch/fetch_at.
class Backend : public pcg::PersistenceHook {
 public:
  Backend(const linalg::Partition& part, OverheadLedger* ledger,
          pcg::ClockSet* clocks, const CostModel& costs)
      : part_(part), ledger_(ledger), clocks_(clocks), costs_(costs) {}
  ~Backend() override = default;

  virtual RecoveryMode mode() const = 0;

  /// Explicit whole-record persistence (recovery tooling and tests);
  /// overwrites the inactive slot, generations increment.
  virtual void persist_record(const esr::RecoveryRecord& record,
                              std::size_t crash_cut = SIZE_MAX) = 0;

  /// Newest checksum-valid record of `owner`.
  virtual esr::RecoveryRecord fetch(int owner, int requester) = 0;
  /// Record of `owner` at exactly iteration j, if still retained.
  virtual std::optional<esr::RecoveryRecord> fetch_at(int owner,
                                                      std::uint64_t j,
                                                      int requester) = 0;
  /// Iterations with complete records for `owner`, ascending.
  virtual std::vector<std::uint64_t> available_iterations(int owner) = 0;

  virtual void on_rank_down(int /*rank*/) {}
  virtual void on_rank_up(int /*rank*/) {}
  /// Drops pair staging (used after a rollback).
  virtual void reset_sessions() {}
  /// Writes end-of-run residency counters into the ledger.
  virtual void fill_residency(OverheadLedger& /*ledger*/) const {}

  void arm_crash(CrashInject ci) { inject_ = std::move(ci); }
  void disarm_crash() { inject_.reset(); }
  void set_liveness(std::function<bool(int)> alive) { alive_ = std::move(alive); }
  std::uint64_t degraded_warnings() const { return degraded_; }

 protected:
  struct PairSession {
    bool has = false;
    std::uint64_t j = 0;
    std::vector<double> slice;
  };

  bool is_alive(int rank) const { return alive_ ? alive_(rank) : true; }
  bool is_victim(int rank) const {
    if (!inject_) return false;
    for (int v : inject_->victims)
      if (v == rank) return true;
    return false;
  }
  std::size_t victim_cut() const { return inject_ ? inject_->cut : SIZE_MAX; }

  linalg::Partition part_;
  OverheadLedger* ledger_;
  pcg::ClockSet* clocks_;
  CostModel costs_;
  std::optional<CrashInject> inject_;
  std::function<bool(int)> alive_;
  std::uint64_t degraded_ = 0;
};

/// In-memory redundancy at c+1 peer stores per owner, piggybacked on
/// the SpMV halo traffic at persistence iterations.
class PeerRamBackend final : public Backend {
 public:
  PeerRamBackend(const linalg::Partition& part, int c,
                 const cluster::HaloPlan* halo, OverheadLedger* ledger,
                 pcg::ClockSet* clocks, const CostModel& costs);

  RecoveryMode mode() const override { return RecoveryMode::esr_inmem; }
  void on_persist(std::uint64_t j, bool pair_close, int rank,
                  std::span<const double> p_slice, double beta_prev) override;
  void persist_record(const esr::RecoveryRecord& record,
                      std::size_t crash_cut) override;
  esr::RecoveryRecord fetch(int owner, int requester) override;
  std::optional<esr::RecoveryRecord> fetch_at(int owner, std::uint64_t j,
                                              int requester) override;
  std::vector<std::uint64_t> available_iterations(int owner) override;
  void on_rank_down(int rank) override;
  void fill_residency(OverheadLedger& ledger) const override;

  const esr::RedundancyStore& store_of(int rank) const { return stores_[rank]; }
  esr::RedundancyStore& store_of(int rank) { return stores_[rank]; }

 private:
  void deliver(int owner, std::uint64_t j, double beta,
               std::span<const double> slice, bool piggybacked);

  int c_;
  const cluster::HaloPlan* halo_;
  std::vector<esr::RedundancyStore> stores_;
};

/// One durable slot pair per rank; records survive the owner's crash
/// but stay unreachable until the owner's node recovers.
class LocalSlotBackend final : public Backend {
 public:
  LocalSlotBackend(const linalg::Partition& part,
                   const std::filesystem::path& dir, OverheadLedger* ledger,
                   pcg::ClockSet* clocks, const CostModel& costs);

  RecoveryMode mode() const override { return RecoveryMode::nvm_local; }
  void on_persist(std::uint64_t j, bool pair_close, int rank,
                  std::span<const double> p_slice, double beta_prev) override;
  void persist_record(const esr::RecoveryRecord& record,
                      std::size_t crash_cut) override;
  esr::RecoveryRecord fetch(int owner, int requester) override;
  std::optional<esr::RecoveryRecord> fetch_at(int owner, std::uint64_t j,
                                              int requester) override;
  std::vector<std::uint64_t> available_iterations(int owner) override;
  void on_rank_down(int rank) override;
  void on_rank_up(int rank) override;
  void reset_sessions() override;
  void fill_residency(OverheadLedger& ledger) const override;

 private:
  void commit_record(const esr::RecoveryRecord& record, std::size_t cut);
  rma::SlotPairFile& slot(int rank);

  std::filesystem::path dir_;
  std::vector<std::optional<rma::SlotPairFile>> slots_;
  std::vector<PairSession> sessions_;
  std::set<int> down_;
};

/// All records ship to one remote PRD window through a PSCW epoch per
/// persistence pair; the window stays readable by every live rank.
class PrdWindowBackend final : public Backend {
 public:
  PrdWindowBackend(const linalg::Partition& part,
                   const std::filesystem::path& dir, OverheadLedger* ledger,
                   pcg::ClockSet* clocks, const CostModel& costs);

  RecoveryMode mode() const override { return RecoveryMode::nvm_prd; }
  void on_persist(std::uint64_t j, bool pair_close, int rank,
                  std::span<const double> p_slice, double beta_prev) override;
  void on_persist_phase_done(std::uint64_t j, bool pair_close) override;
  void persist_record(const esr::RecoveryRecord& record,
                      std::size_t crash_cut) override;
  esr::RecoveryRecord fetch(int owner, int requester) override;
  std::optional<esr::RecoveryRecord> fetch_at(int owner, std::uint64_t j,
                                              int requester) override;
  std::vector<std::uint64_t> available_iterations(int owner) override;
  void on_rank_down(int rank) override;
  void reset_sessions() override;
  void fill_residency(OverheadLedger& ledger) const override;

  int prd_rank() const { return part_.proc; }
  rma::Window& window() { return window_; }

 private:
  std::size_t region_offset(int rank) const { return region_offsets_[rank]; }
  std::size_t region_len(int rank) const {
    return esr::RecoveryRecord::serialized_size(part_.block_size(rank));
  }
  std::optional<esr::RecoveryRecord> parse_region(
      const std::vector<std::uint8_t>& image, int owner) const;

  std::vector<std::size_t> region_offsets_;
  rma::Window window_;
  std::vector<PairSession> sessions_;
  std::vector<std::optional<std::vector<std::uint8_t>>> pending_;
  std::uint64_t pending_j_ = 0;
  bool prd_down_ = false;
};

/// Backend factory; nullptr for RecoveryMode::none.
std::unique_ptr<Backend> make_backend(RecoveryMode mode,
                                      const linalg::Partition& part, int c,
                                      const cluster::HaloPlan* halo,
                                      const std::filesystem::path& dir,
                                      OverheadLedger* ledger,
                                      pcg::ClockSet* clocks,
                                      const CostModel& costs);

}  // namespace pstore
}  // namespace esrsim
