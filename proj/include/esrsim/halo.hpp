// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "esrsim/csr.hpp"

namespace esrsim {
namespace cluster {

/// Static communication plan for the distributed SpMV: which remote
/// vector entries each rank's rows reference, grouped into one message
/// per (owner, needer) pair. Message order is deterministic
/// (owner-major, then needer), and entries within a message are sorted
/// by global index.
class HaloPlan {
 public:
  HaloPlan() = default;
  HaloPlan(const linalg::CsrMatrix& a, const linalg::Partition& part);

  struct Message {
    int owner;
    int needer;
    std::vector<std::int64_t> cols;  // sorted global indices
  };

  const std::vector<Message>& messages() const { return messages_; }
  std::uint64_t total_values_per_exchange() const { return total_values_; }

  /// Entries rank `owner` ships to rank `needer` per exchange (0 when
  /// no message exists). These rides are what the augmented SpMV does
  /// not have to resend.
  std::uint64_t overlap(int owner, int needer) const;

  /// Ghost values for one exchange: per rank, global index -> value.
  /// `slice_of(rank)` must return the owner's current slice.
  template <typename SliceFn>
  std::vector<std::unordered_map<std::int64_t, double>> exchange(
      int proc, SliceFn&& slice_of) const {
    std::vector<std::unordered_map<std::int64_t, double>> ghosts(proc);
    for (const auto& m : messages_) {
      std::span<const double> s = slice_of(m.owner);
      for (std::int64_t col : m.cols)
        ghosts[m.needer].emplace(col, s[col - part_.block_begin(m.owner)]);
    }
    return ghosts;
  }

  const linalg::Partition& partition() const { return part_; }

 private:
  linalg::Partition part_;
  std::vector<Message> messages_;
  std::uint64_t total_values_ = 0;
};

}  // namespace cluster
}  // namespace esrsim
