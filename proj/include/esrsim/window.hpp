// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "esrsim/simtime.hpp"
#include "esrsim/slot_file.hpp"

namespace esrsim {
namespace rma {

struct EpochGroup {
  std::vector<int> members;  // origin ranks, non-empty
};

enum class WindowBacking { volatile_ram, durable };

/// One-sided communication window with active-target synchronization
/// and persist-extended epoch closes. The exposure epoch is the only
/// interval during which origins may access the window, and data
/// becomes durable exactly when the exposure closes (wait_persist /
/// fence_persist). Puts land in the inactive slot of a double buffer;
/// the active slot flips only when the full payload+header sequence
/// reached the medium, so a crash mid-persist always leaves the
/// previous complete epoch readable.
///
/// All methods take and return simulated time explicitly; the caller
/// owns the per-rank clocks.
class Window {
 public:
  /// Durable windows place their alternating slots under dir/<base>.
  Window(int target_rank, std::size_t size_bytes, WindowBacking backing,
         const CostModel& costs, const std::filesystem::path& dir = {},
         const std::string& base = {});

  int target() const { return target_rank_; }
  std::size_t size() const { return size_; }
  std::uint64_t epochs_completed() const { return epochs_completed_; }
  int active_slot() const { return active_slot_; }

  // --- PSCW, target side ---
  void post(const EpochGroup& group, SimTime target_now);

  /// Closes the exposure epoch durably. Returns the target-side
  /// completion time (persist included). `crash_cut` truncates the
  /// durable write sequence for fault injection; the window is then
  /// dead. `iteration` is recorded in the slot header.
  SimTime wait_persist(SimTime target_now, std::uint64_t iteration,
                       std::size_t crash_cut = SIZE_MAX);

  // --- PSCW, origin side ---
  void start(int origin, SimTime origin_now);
  void put_pmem(int origin, std::size_t offset,
                const std::vector<std::uint8_t>& bytes);
  std::vector<std::uint8_t> get_pmem(int origin, std::size_t offset,
                                     std::size_t len) const;
  /// Ends the origin's access epoch. Returns the origin-side completion
  /// time, which never includes the target's persist cost.
  SimTime complete(int origin, SimTime origin_now);

  // --- collective fence synchronization ---
  /// Every participant must call. The closing call (the last of the
  /// participant set) performs the durable commit and returns its
  /// completion time; other calls return nullopt.
  std::optional<SimTime> fence_persist(int rank, SimTime now,
                                       const std::vector<int>& participants,
                                       std::uint64_t iteration = 0);
  /// Deterministic stand-in for a deadlock timeout: raises
  /// collective_mismatch when a fence was entered but never completed.
  void check_collective_complete() const;

  // --- passive target (not supported; active target fits the protocol) ---
  [[noreturn]] void lock(int origin);
  [[noreturn]] void unlock(int origin);

  // --- recovery-side reads ---
  /// Re-scans the slot files as a restarted process would and returns
  /// the newest checksum-valid content. Durable backing only.
  std::optional<SlotPairFile::Recovered> recover_from_medium() const;
  /// Both valid slots, newest first. Durable backing only.
  std::vector<SlotPairFile::Recovered> recover_all_from_medium() const;

  struct EpochStats {
    std::map<int, SimTime> origin_complete_time;
    SimTime persist_start = 0;
    SimTime persist_done = 0;
    std::uint64_t bytes_put = 0;
    std::uint64_t durable_bytes_written = 0;
  };
  const EpochStats& last_epoch() const { return last_epoch_; }

 private:
  enum class State { idle, exposed, fence };

  SimTime commit_inactive(SimTime start_time, std::uint64_t iteration,
                          std::size_t crash_cut);

  int target_rank_;
  std::size_t size_;
  WindowBacking backing_;
  CostModel costs_;

  State state_ = State::idle;
  std::vector<int> exposure_group_;
  std::set<int> started_;
  std::set<int> completed_;
  struct Put {
    int origin;
    std::size_t offset;
    std::vector<std::uint8_t> bytes;
  };
  std::vector<Put> staged_;
  std::map<int, SimTime> origin_done_;

  // Double buffer images; images_[active] mirrors the committed slot.
  std::vector<std::uint8_t> images_[2];
  int active_slot_ = -1;  // -1: nothing committed yet, reads see zeros
  SlotPairFile files_;

  std::set<int> fence_called_;
  std::uint64_t epochs_completed_ = 0;
  EpochStats last_epoch_;
};

}  // namespace rma
}  // namespace esrsim
