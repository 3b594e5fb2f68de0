// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/pstore.hpp"

#include <algorithm>

#include "esrsim/error.hpp"

namespace esrsim {
namespace pstore {

namespace {

// Serialized-record bytes that are not vector entries (iteration,
// owner, length, beta, checksum).
constexpr std::uint64_t kRecordMetaBytes = 36;

bool all_zero(const std::vector<std::uint8_t>& bytes) {
  for (std::uint8_t b : bytes)
    if (b != 0) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// PeerRamBackend

PeerRamBackend::PeerRamBackend(const linalg::Partition& part, int c,
                               const cluster::HaloPlan* halo,
                               OverheadLedger* ledger, pcg::ClockSet* clocks,
                               const CostModel& costs)
    : Backend(part, ledger, clocks, costs), c_(c), halo_(halo),
      stores_(part.proc) {}

void PeerRamBackend::deliver(int owner, std::uint64_t j, double beta,
                             std::span<const double> slice, bool piggybacked) {
  const auto holders = esr::holder_placement(owner, part_.proc, c_);
  const std::size_t limit = is_victim(owner) ? victim_cut() : SIZE_MAX;
  std::size_t delivered = 0;
  std::size_t live_holders = 0;
  for (int h : holders) {
    if (h == owner) {
      // The owner's retained self-copy (full fault tolerance only);
      // nothing crosses the wire for it.
      stores_[h].store(owner, j, beta, slice);
      continue;
    }
    if (!is_alive(h)) {
      ++degraded_;
      continue;
    }
    ++live_holders;
    if (delivered >= limit) continue;  // victim died mid-delivery
    stores_[h].store(owner, j, beta, slice);
    ++delivered;
    const std::uint64_t overlap =
        piggybacked && halo_ ? halo_->overlap(owner, h) : 0;
    const std::uint64_t values = slice.size() - overlap;
    if (ledger_) {
      ledger_->wire_redundancy_values_total += values;
      ledger_->wire_meta_bytes_total += 16;  // iteration + beta ride along
    }
    if (clocks_) {
      const SimTime cost =
          costs_.msg_latency + costs_.wire_per_byte * (values * 8 + 16);
      clocks_->t[owner] += cost;
      if (ledger_) ledger_->persist_simtime_total += cost;
    }
  }
  std::size_t non_owner_holders = 0;
  for (int h : holders)
    if (h != owner) ++non_owner_holders;
  if (live_holders == 0 && non_owner_holders > 0)
    raise(ErrorCode::backend_unavailable,
          "no live holder remains for rank " + std::to_string(owner));
}

void PeerRamBackend::on_persist(std::uint64_t j, bool /*pair_close*/, int rank,
                                std::span<const double> p_slice,
                                double beta_prev) {
  deliver(rank, j, beta_prev, p_slice, /*piggybacked=*/true);
}

void PeerRamBackend::persist_record(const esr::RecoveryRecord& record,
                                    std::size_t /*crash_cut*/) {
  if (!record.checksum_ok())
    raise(ErrorCode::corrupt_record, "record not sealed");
  deliver(record.owner, record.j - 1, 0.0, record.p_prev, false);
  deliver(record.owner, record.j, record.beta_prev, record.p_curr, false);
}

esr::RecoveryRecord PeerRamBackend::fetch(int owner, int requester) {
  std::optional<esr::RecoveryRecord> best;
  for (int h : esr::holder_placement(owner, part_.proc, c_)) {
    if (!is_alive(h)) continue;
    if (h == owner) continue;  // the owner's RAM died with it
    auto rec = stores_[h].assemble(owner);
    if (rec && (!best || rec->j > best->j)) best = std::move(rec);
  }
  if (!best)
    raise(ErrorCode::cold_start,
          "no surviving redundancy pair for rank " + std::to_string(owner));
  if (ledger_) {
    ledger_->wire_recovery_values_total += best->p_prev.size() * 2;
    ledger_->wire_meta_bytes_total += kRecordMetaBytes;
  }
  if (clocks_ && requester >= 0 && requester < part_.proc)
    clocks_->t[requester] +=
        costs_.msg_latency +
        costs_.wire_per_byte * (best->p_prev.size() * 16 + kRecordMetaBytes);
  return *best;
}

std::optional<esr::RecoveryRecord> PeerRamBackend::fetch_at(int owner,
                                                            std::uint64_t j,
                                                            int requester) {
  for (int h : esr::holder_placement(owner, part_.proc, c_)) {
    if (!is_alive(h) || h == owner) continue;
    auto rec = stores_[h].assemble(owner, j);
    if (rec && rec->j == j) {
      if (ledger_) {
        ledger_->wire_recovery_values_total += rec->p_prev.size() * 2;
        ledger_->wire_meta_bytes_total += kRecordMetaBytes;
      }
      if (clocks_ && requester >= 0 && requester < part_.proc)
        clocks_->t[requester] +=
            costs_.msg_latency +
            costs_.wire_per_byte * (rec->p_prev.size() * 16 + kRecordMetaBytes);
      return rec;
    }
  }
  return std::nullopt;
}

std::vector<std::uint64_t> PeerRamBackend::available_iterations(int owner) {
  std::set<std::uint64_t> js;
  for (int h : esr::holder_placement(owner, part_.proc, c_)) {
    if (!is_alive(h) || h == owner) continue;
    if (auto j = stores_[h].newest_pair_iteration(owner)) js.insert(*j);
  }
  return {js.begin(), js.end()};
}

void PeerRamBackend::on_rank_down(int rank) { stores_[rank].clear(); }

void PeerRamBackend::fill_residency(OverheadLedger& ledger) const {
  std::uint64_t values = 0;
  for (const auto& s : stores_) values += s.resident_values();
  ledger.ram_redundancy_values = values;
  ledger.nvm_resident_values = 0;
  ledger.nvm_slot_bytes_resident = 0;
}

// ---------------------------------------------------------------------------
// LocalSlotBackend

LocalSlotBackend::LocalSlotBackend(const linalg::Partition& part,
                                   const std::filesystem::path& dir,
                                   OverheadLedger* ledger,
                                   pcg::ClockSet* clocks,
                                   const CostModel& costs)
    : Backend(part, ledger, clocks, costs), dir_(dir), slots_(part.proc),
      sessions_(part.proc) {}

rma::SlotPairFile& LocalSlotBackend::slot(int rank) {
  if (!slots_[rank])
    slots_[rank] =
        rma::SlotPairFile::open(dir_, "rank" + std::to_string(rank));
  return *slots_[rank];
}

void LocalSlotBackend::commit_record(const esr::RecoveryRecord& record,
                                     std::size_t cut) {
  const auto payload = record.serialize();
  slot(record.owner).commit(record.j, static_cast<std::uint32_t>(record.owner),
                            payload, cut);
  const std::uint64_t written =
      std::min<std::uint64_t>(cut, rma::SlotPairFile::sequence_length(payload.size()));
  const SimTime duration =
      costs_.persist_latency + costs_.persist_per_byte * written;
  if (ledger_) {
    ledger_->nvm_bytes_written_total += written;
    ledger_->persist_simtime_total += duration;
    ++ledger_->nvm_commits_total;
  }
  // Local persistence occupies the owner (memory-bus write).
  if (clocks_ && record.owner < static_cast<int>(clocks_->t.size()))
    clocks_->t[record.owner] += duration;
}

void LocalSlotBackend::on_persist(std::uint64_t j, bool pair_close, int rank,
                                  std::span<const double> p_slice,
                                  double beta_prev) {
  if (ledger_) ledger_->nvm_written_values_total += p_slice.size();
  auto& session = sessions_[rank];
  if (pair_close && session.has && session.j + 1 == j) {
    esr::RecoveryRecord rec;
    rec.owner = rank;
    rec.j = j;
    rec.beta_prev = beta_prev;
    rec.p_prev = session.slice;
    rec.p_curr.assign(p_slice.begin(), p_slice.end());
    rec.seal();
    commit_record(rec, is_victim(rank) ? victim_cut() : SIZE_MAX);
  }
  session.has = true;
  session.j = j;
  session.slice.assign(p_slice.begin(), p_slice.end());
}

void LocalSlotBackend::persist_record(const esr::RecoveryRecord& record,
                                      std::size_t crash_cut) {
  if (!record.checksum_ok())
    raise(ErrorCode::corrupt_record, "record not sealed");
  commit_record(record, crash_cut);
}

esr::RecoveryRecord LocalSlotBackend::fetch(int owner, int /*requester*/) {
  if (down_.count(owner))
    raise(ErrorCode::backend_unavailable,
          "local slots unreachable until rank " + std::to_string(owner) +
              " recovers");
  auto rec = slot(owner).recover();
  if (!rec)
    raise(ErrorCode::cold_start,
          "no persisted record for rank " + std::to_string(owner));
  return esr::RecoveryRecord::deserialize(rec->payload);
}

std::optional<esr::RecoveryRecord> LocalSlotBackend::fetch_at(
    int owner, std::uint64_t j, int /*requester*/) {
  if (down_.count(owner))
    raise(ErrorCode::backend_unavailable,
          "local slots unreachable until rank " + std::to_string(owner) +
              " recovers");
  for (const auto& slot_content : slot(owner).recover_all()) {
    if (slot_content.header.iteration != j) continue;
    auto rec = esr::RecoveryRecord::deserialize(slot_content.payload);
    if (rec.j == j) return rec;
  }
  return std::nullopt;
}

std::vector<std::uint64_t> LocalSlotBackend::available_iterations(int owner) {
  if (down_.count(owner)) return {};
  std::set<std::uint64_t> js;
  for (const auto& s : slot(owner).recover_all()) js.insert(s.header.iteration);
  return {js.begin(), js.end()};
}

void LocalSlotBackend::on_rank_down(int rank) {
  down_.insert(rank);
  sessions_[rank] = PairSession{};
}

void LocalSlotBackend::on_rank_up(int rank) {
  down_.erase(rank);
  slots_[rank].reset();  // reopened lazily, generations restored from disk
}

void LocalSlotBackend::reset_sessions() {
  for (auto& s : sessions_) s = PairSession{};
}

void LocalSlotBackend::fill_residency(OverheadLedger& ledger) const {
  std::uint64_t bytes = 0;
  std::uint64_t values = 0;
  for (int rank = 0; rank < part_.proc; ++rank) {
    if (!slots_[rank]) continue;
    bytes += slots_[rank]->bytes_on_medium();
    if (slots_[rank]->recover()) values += 2 * part_.block_size(rank);
  }
  ledger.nvm_slot_bytes_resident = bytes;
  ledger.nvm_resident_values = values;
  ledger.ram_redundancy_values = 0;
}

// ---------------------------------------------------------------------------
// PrdWindowBackend

PrdWindowBackend::PrdWindowBackend(const linalg::Partition& part,
                                   const std::filesystem::path& dir,
                                   OverheadLedger* ledger,
                                   pcg::ClockSet* clocks,
                                   const CostModel& costs)
    : Backend(part, ledger, clocks, costs),
      region_offsets_(part.proc + 1, 0),
      window_((/*prd rank*/ part.proc),
              [&] {
                std::size_t total = 0;
                for (int s = 0; s < part.proc; ++s)
                  total += esr::RecoveryRecord::serialized_size(
                      part.block_size(s));
                return total;
              }(),
              rma::WindowBacking::durable, costs, dir, "prd_window"),
      sessions_(part.proc),
      pending_(part.proc) {
  for (int s = 0; s < part_.proc; ++s)
    region_offsets_[s + 1] = region_offsets_[s] + region_len(s);
}

void PrdWindowBackend::on_persist(std::uint64_t j, bool pair_close, int rank,
                                  std::span<const double> p_slice,
                                  double beta_prev) {
  if (prd_down_)
    raise(ErrorCode::backend_unavailable, "PRD node is down");
  if (ledger_) ledger_->nvm_written_values_total += p_slice.size();
  auto& session = sessions_[rank];
  if (pair_close && session.has && session.j + 1 == j) {
    esr::RecoveryRecord rec;
    rec.owner = rank;
    rec.j = j;
    rec.beta_prev = beta_prev;
    rec.p_prev = session.slice;
    rec.p_curr.assign(p_slice.begin(), p_slice.end());
    rec.seal();
    pending_[rank] = rec.serialize();
    pending_j_ = j;
    if (ledger_) {
      ledger_->wire_redundancy_values_total += 2 * p_slice.size();
      ledger_->wire_meta_bytes_total += kRecordMetaBytes;
    }
  }
  session.has = true;
  session.j = j;
  session.slice.assign(p_slice.begin(), p_slice.end());
}

void PrdWindowBackend::on_persist_phase_done(std::uint64_t j, bool pair_close) {
  if (!pair_close) return;
  rma::EpochGroup group;
  for (int s = 0; s < part_.proc; ++s)
    if (pending_[s]) group.members.push_back(s);
  if (group.members.empty()) return;

  // One PSCW epoch per pair: origins put their records and proceed; the
  // PRD persists at exposure close.
  window_.post(group, clocks_ ? clocks_->prd : 0);
  for (int s : group.members) {
    const SimTime now = clocks_ ? clocks_->t[s] : 0;
    window_.start(s, now);
    window_.put_pmem(s, region_offset(s), *pending_[s]);
    const SimTime done = window_.complete(s, now);
    if (clocks_) clocks_->t[s] = done;
    pending_[s].reset();
  }
  const std::size_t cut = inject_ ? inject_->cut : SIZE_MAX;
  const SimTime done =
      window_.wait_persist(clocks_ ? clocks_->prd : 0, j, cut);
  if (clocks_) clocks_->prd = done;
  if (ledger_) {
    ledger_->persist_simtime_total +=
        done - window_.last_epoch().persist_start;
    ledger_->nvm_bytes_written_total +=
        window_.last_epoch().durable_bytes_written;
    ++ledger_->nvm_commits_total;
  }
}

void PrdWindowBackend::persist_record(const esr::RecoveryRecord& record,
                                      std::size_t crash_cut) {
  if (prd_down_)
    raise(ErrorCode::backend_unavailable, "PRD node is down");
  if (!record.checksum_ok())
    raise(ErrorCode::corrupt_record, "record not sealed");
  const int owner = record.owner;
  rma::EpochGroup group{{owner}};
  window_.post(group, clocks_ ? clocks_->prd : 0);
  const SimTime now =
      clocks_ && owner < static_cast<int>(clocks_->t.size()) ? clocks_->t[owner] : 0;
  window_.start(owner, now);
  window_.put_pmem(owner, region_offset(owner), record.serialize());
  const SimTime origin_done = window_.complete(owner, now);
  if (clocks_ && owner < static_cast<int>(clocks_->t.size()))
    clocks_->t[owner] = origin_done;
  const SimTime done =
      window_.wait_persist(clocks_ ? clocks_->prd : 0, record.j, crash_cut);
  if (clocks_) clocks_->prd = done;
  if (ledger_) {
    ledger_->wire_redundancy_values_total += 2 * record.p_curr.size();
    ledger_->wire_meta_bytes_total += kRecordMetaBytes;
    ledger_->persist_simtime_total +=
        done - window_.last_epoch().persist_start;
    ledger_->nvm_bytes_written_total +=
        window_.last_epoch().durable_bytes_written;
    ++ledger_->nvm_commits_total;
  }
}

std::optional<esr::RecoveryRecord> PrdWindowBackend::parse_region(
    const std::vector<std::uint8_t>& image, int owner) const {
  const std::size_t off = region_offset(owner), len = region_len(owner);
  if (image.size() < off + len) return std::nullopt;
  std::vector<std::uint8_t> bytes(image.begin() + off,
                                  image.begin() + off + len);
  if (all_zero(bytes)) return std::nullopt;
  return esr::RecoveryRecord::deserialize(bytes);
}

esr::RecoveryRecord PrdWindowBackend::fetch(int owner, int requester) {
  if (prd_down_)
    raise(ErrorCode::backend_unavailable, "PRD node is down");
  // Read epoch against the committed (active) slot.
  rma::EpochGroup group{{requester}};
  window_.post(group, clocks_ ? clocks_->prd : 0);
  const SimTime now =
      clocks_ && requester < static_cast<int>(clocks_->t.size())
          ? clocks_->t[requester] : 0;
  window_.start(requester, now);
  const auto bytes =
      window_.get_pmem(requester, region_offset(owner), region_len(owner));
  SimTime done = window_.complete(requester, now);
  done += costs_.msg_latency + costs_.wire_per_byte * bytes.size();
  if (clocks_ && requester < static_cast<int>(clocks_->t.size()))
    clocks_->t[requester] = done;
  const SimTime prd_done =
      window_.wait_persist(clocks_ ? clocks_->prd : 0, pending_j_);
  if (clocks_) clocks_->prd = prd_done;

  if (all_zero(bytes))
    raise(ErrorCode::cold_start,
          "no persisted record for rank " + std::to_string(owner));
  auto rec = esr::RecoveryRecord::deserialize(bytes);
  if (rec.owner != owner)
    raise(ErrorCode::corrupt_record, "record owner mismatch");
  if (ledger_) {
    ledger_->wire_recovery_values_total += 2 * rec.p_curr.size();
    ledger_->wire_meta_bytes_total += kRecordMetaBytes;
  }
  return rec;
}

std::optional<esr::RecoveryRecord> PrdWindowBackend::fetch_at(
    int owner, std::uint64_t j, int requester) {
  if (prd_down_)
    raise(ErrorCode::backend_unavailable, "PRD node is down");
  // Scan the medium as a restarted reader would; the newest valid slot
  // comes first, the partner slot covers the fallback pair.
  std::optional<esr::RecoveryRecord> found;
  for (const auto& slot_content : window_.recover_all_from_medium()) {
    auto rec = parse_region(slot_content.payload, owner);
    if (rec && rec->j == j) {
      found = std::move(rec);
      break;
    }
  }
  if (!found) return std::nullopt;
  if (ledger_) {
    ledger_->wire_recovery_values_total += 2 * found->p_curr.size();
    ledger_->wire_meta_bytes_total += kRecordMetaBytes;
  }
  if (clocks_ && requester >= 0 && requester < static_cast<int>(clocks_->t.size()))
    clocks_->t[requester] +=
        costs_.msg_latency + costs_.wire_per_byte * region_len(owner);
  return found;
}

std::vector<std::uint64_t> PrdWindowBackend::available_iterations(int owner) {
  if (prd_down_) return {};
  std::set<std::uint64_t> js;
  for (const auto& slot_content : window_.recover_all_from_medium())
    if (auto rec = parse_region(slot_content.payload, owner)) js.insert(rec->j);
  return {js.begin(), js.end()};
}

void PrdWindowBackend::on_rank_down(int rank) {
  if (rank == prd_rank()) prd_down_ = true;
  else sessions_[rank] = PairSession{};
}

void PrdWindowBackend::reset_sessions() {
  for (auto& s : sessions_) s = PairSession{};
  for (auto& p : pending_) p.reset();
}

void PrdWindowBackend::fill_residency(OverheadLedger& ledger) const {
  std::uint64_t values = 0;
  for (int owner = 0; owner < part_.proc; ++owner) {
    bool have = false;
    for (const auto& slot_content : window_.recover_all_from_medium())
      if (parse_region(slot_content.payload, owner)) have = true;
    if (have) values += 2 * part_.block_size(owner);
  }
  ledger.nvm_resident_values = values;
  std::uint64_t bytes = 0;
  for (const auto& slot_content : window_.recover_all_from_medium())
    bytes += rma::SlotHeader::kSize + slot_content.payload.size();
  ledger.nvm_slot_bytes_resident = bytes;
  ledger.ram_redundancy_values = 0;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Backend> make_backend(RecoveryMode mode,
                                      const linalg::Partition& part, int c,
                                      const cluster::HaloPlan* halo,
                                      const std::filesystem::path& dir,
                                      OverheadLedger* ledger,
                                      pcg::ClockSet* clocks,
                                      const CostModel& costs) {
  switch (mode) {
    case RecoveryMode::none:
      return nullptr;
    case RecoveryMode::esr_inmem:
      return std::make_unique<PeerRamBackend>(part, c, halo, ledger, clocks,
                                              costs);
    case RecoveryMode::nvm_local:
      return std::make_unique<LocalSlotBackend>(part, dir, ledger, clocks,
                                                costs);
    case RecoveryMode::nvm_prd:
      return std::make_unique<PrdWindowBackend>(part, dir, ledger, clocks,
                                                costs);
  }
  return nullptr;
}

}  // namespace pstore
}  // namespace esrsim
