// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/window.hpp"

#include <algorithm>

#include "esrsim/error.hpp"

namespace esrsim {
namespace rma {

Window::Window(int target_rank, std::size_t size_bytes, WindowBacking backing,
               const CostModel& costs, const std::filesystem::path& dir,
               const std::string& base)
    : target_rank_(target_rank),
      size_(size_bytes),
      backing_(backing),
      costs_(costs) {
  images_[0].assign(size_, 0);
  images_[1].assign(size_, 0);
  if (backing_ == WindowBacking::durable) {
    if (dir.empty())
      raise(ErrorCode::invalid_config, "durable window needs a directory");
    files_ = SlotPairFile::open(dir, base.empty() ? "window" : base);
  }
}

void Window::post(const EpochGroup& group, SimTime) {
  if (group.members.empty())
    raise(ErrorCode::invalid_config, "exposure group is empty");
  if (state_ != State::idle)
    raise(ErrorCode::epoch_violation,
          "post while an epoch is open; exposure epochs must be disjoint");
  exposure_group_ = group.members;
  started_.clear();
  completed_.clear();
  staged_.clear();
  origin_done_.clear();
  state_ = State::exposed;
}

void Window::start(int origin, SimTime) {
  if (state_ != State::exposed)
    raise(ErrorCode::epoch_violation, "start without a posted exposure epoch");
  if (std::find(exposure_group_.begin(), exposure_group_.end(), origin) ==
      exposure_group_.end())
    raise(ErrorCode::epoch_violation, "origin not in the exposure group");
  if (started_.count(origin))
    raise(ErrorCode::epoch_violation, "origin already in an access epoch");
  started_.insert(origin);
}

void Window::put_pmem(int origin, std::size_t offset,
                      const std::vector<std::uint8_t>& bytes) {
  if (state_ == State::fence) {
    // Fence epochs allow accesses from any participant.
  } else {
    if (state_ != State::exposed || !started_.count(origin) ||
        completed_.count(origin))
      raise(ErrorCode::epoch_violation, "put outside an access epoch");
  }
  if (offset + bytes.size() > size_)
    raise(ErrorCode::range_violation, "put beyond window bounds");
  staged_.push_back(Put{origin, offset, bytes});
}

std::vector<std::uint8_t> Window::get_pmem(int origin, std::size_t offset,
                                           std::size_t len) const {
  if (state_ == State::fence) {
    // Accessible to fence participants.
  } else {
    if (state_ != State::exposed || !started_.count(origin) ||
        completed_.count(origin))
      raise(ErrorCode::epoch_violation, "get outside an access epoch");
  }
  if (offset + len > size_)
    raise(ErrorCode::range_violation, "get beyond window bounds");
  // Reads observe committed (durable) content only, never staged puts.
  const auto& img = images_[active_slot_ < 0 ? 0 : active_slot_];
  return std::vector<std::uint8_t>(img.begin() + offset,
                                   img.begin() + offset + len);
}

SimTime Window::complete(int origin, SimTime origin_now) {
  if (state_ != State::exposed || !started_.count(origin))
    raise(ErrorCode::epoch_violation, "complete without start");
  if (completed_.count(origin))
    raise(ErrorCode::epoch_violation, "origin already completed");
  SimTime t = origin_now;
  for (const auto& p : staged_)
    if (p.origin == origin)
      t += costs_.msg_latency + costs_.wire_per_byte * p.bytes.size();
  completed_.insert(origin);
  origin_done_[origin] = t;
  return t;
}

SimTime Window::commit_inactive(SimTime start_time, std::uint64_t iteration,
                                std::size_t crash_cut) {
  const int slot = active_slot_ == 0 ? 1 : 0;
  for (const auto& p : staged_)
    std::copy(p.bytes.begin(), p.bytes.end(), images_[slot].begin() + p.offset);

  std::uint64_t bytes_put = 0;
  for (const auto& p : staged_) bytes_put += p.bytes.size();
  staged_.clear();

  SimTime done = start_time;
  std::uint64_t durable_written = 0;
  bool committed = true;
  if (backing_ == WindowBacking::durable) {
    const std::size_t seq = SlotPairFile::sequence_length(images_[slot].size());
    committed = files_.commit(iteration,
                              static_cast<std::uint32_t>(target_rank_),
                              images_[slot], crash_cut);
    durable_written = std::min(crash_cut, seq);
    done += costs_.persist_latency + costs_.persist_per_byte * durable_written;
  } else {
    done += costs_.ram_copy_per_byte * images_[slot].size();
    committed = crash_cut == SIZE_MAX;
  }
  if (committed) active_slot_ = slot;

  last_epoch_.persist_start = start_time;
  last_epoch_.persist_done = done;
  last_epoch_.bytes_put = bytes_put;
  last_epoch_.durable_bytes_written = durable_written;
  if (committed) ++epochs_completed_;
  return done;
}

SimTime Window::wait_persist(SimTime target_now, std::uint64_t iteration,
                             std::size_t crash_cut) {
  if (state_ != State::exposed)
    raise(ErrorCode::epoch_violation, "wait_persist without an exposure epoch");
  for (int m : exposure_group_)
    if (!completed_.count(m))
      raise(ErrorCode::collective_mismatch,
            "exposure epoch waits on an origin that never completed");

  SimTime start = target_now;
  for (const auto& [origin, t] : origin_done_) start = std::max(start, t);
  last_epoch_.origin_complete_time = origin_done_;

  SimTime done = start;
  if (!staged_.empty() || active_slot_ < 0) {
    done = commit_inactive(start, iteration, crash_cut);
  } else {
    // Nothing was put; there is nothing new to flush and the committed
    // content must not regress to the stale partner slot.
    last_epoch_.persist_start = start;
    last_epoch_.persist_done = done;
    last_epoch_.bytes_put = 0;
    last_epoch_.durable_bytes_written = 0;
    ++epochs_completed_;
  }
  state_ = State::idle;
  return done;
}

std::optional<SimTime> Window::fence_persist(int rank, SimTime now,
                                             const std::vector<int>& participants,
                                             std::uint64_t iteration) {
  if (state_ == State::exposed)
    raise(ErrorCode::epoch_violation, "fence during a PSCW exposure epoch");
  if (std::find(participants.begin(), participants.end(), rank) ==
      participants.end())
    raise(ErrorCode::collective_mismatch, "rank not a fence participant");
  fence_called_.insert(rank);
  if (fence_called_.size() < participants.size()) return std::nullopt;
  fence_called_.clear();
  last_epoch_.origin_complete_time.clear();
  SimTime done = now;
  if (!staged_.empty() || active_slot_ < 0) {
    done = commit_inactive(now, iteration, SIZE_MAX);
  } else {
    // Nothing to flush; committed content must not regress.
    ++epochs_completed_;
  }
  state_ = State::fence;
  return done;
}

void Window::check_collective_complete() const {
  if (!fence_called_.empty())
    raise(ErrorCode::collective_mismatch,
          "fence entered by a strict subset of participants");
}

void Window::lock(int) {
  raise(ErrorCode::unsupported,
        "passive-target synchronization is not provided");
}

void Window::unlock(int) {
  raise(ErrorCode::unsupported,
        "passive-target synchronization is not provided");
}

std::optional<SlotPairFile::Recovered> Window::recover_from_medium() const {
  if (backing_ != WindowBacking::durable) return std::nullopt;
  return files_.recover();
}

std::vector<SlotPairFile::Recovered> Window::recover_all_from_medium() const {
  if (backing_ != WindowBacking::durable) return {};
  return files_.recover_all();
}

}  // namespace rma
}  // namespace esrsim
