// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "esrsim/halo.hpp"
#include "esrsim/record.hpp"

namespace esrsim {
namespace esr {

/// Store locations for one owner's redundancy: the c+1 cyclically-next
/// ranks (s+1 .. s+c+1 mod proc). For c < proc-1 these are all distinct
/// ranks other than the owner; at full fault tolerance (c = proc-1) the
/// wrap reaches the owner itself, whose retained self-copy makes the
/// total exactly c+1 copies, matching the system-wide redundancy
/// estimate of 2*proc*n values. Copies at ranks other than the owner
/// are the ones that cross the wire.
std::vector<int> holder_placement(int owner, int proc, int c);

/// Redundancy entries crossing the wire per persistence iteration:
/// every owner ships its slice to each non-self holder, minus entries
/// already riding in that iteration's halo exchange. Shared by the
/// measured and the analytic ledgers.
std::uint64_t peer_redundancy_wire_rate(const linalg::Partition& part, int c,
                                        const cluster::HaloPlan* halo);

/// Per-rank in-memory redundancy: owner -> sliding window of at most
/// two iterations' p-slices (with the scalar coupling them).
class RedundancyStore {
 public:
  struct Entry {
    std::uint64_t j = 0;
    double beta_prev = 0.0;  // beta^(j-1), as shipped with iteration j
    std::vector<double> slice;
    std::uint64_t checksum = 0;

    void seal();
    bool checksum_ok() const;
  };

  void store(int owner, std::uint64_t j, double beta_prev,
             std::span<const double> slice);

  /// Newest consecutive (j-1, j) pair assembled into a RecoveryRecord,
  /// optionally capped at `max_j`. Throws corrupt_record when a stored
  /// entry fails its checksum.
  std::optional<RecoveryRecord> assemble(
      int owner, std::optional<std::uint64_t> max_j = std::nullopt) const;

  std::optional<std::uint64_t> newest_pair_iteration(int owner) const;

  std::uint64_t resident_values() const;
  std::size_t retained(int owner) const;
  void clear();  // volatile contents lost with the rank

  /// Test hook: flips one byte inside a stored slice to emulate memory
  /// corruption; fetches must then fail checksum validation.
  void corrupt_for_test(int owner, std::size_t which_entry,
                        std::size_t byte_index);

 private:
  std::map<int, std::deque<Entry>> by_owner_;
};

}  // namespace esr
}  // namespace esrsim
