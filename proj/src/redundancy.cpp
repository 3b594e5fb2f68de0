// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/redundancy.hpp"

#include <cstring>

#include "esrsim/error.hpp"
#include "esrsim/vecops.hpp"

namespace esrsim {
namespace esr {

std::vector<int> holder_placement(int owner, int proc, int c) {
  if (proc < 1 || owner < 0 || owner >= proc || c < 0 || c >= proc)
    raise(ErrorCode::placement_invalid, "holder placement arguments");
  std::vector<int> holders;
  holders.reserve(c + 1);
  for (int k = 1; k <= c + 1; ++k) holders.push_back((owner + k) % proc);
  return holders;
}

std::uint64_t peer_redundancy_wire_rate(const linalg::Partition& part, int c,
                                        const cluster::HaloPlan* halo) {
  std::uint64_t values = 0;
  for (int owner = 0; owner < part.proc; ++owner)
    for (int h : holder_placement(owner, part.proc, c)) {
      if (h == owner) continue;
      values += static_cast<std::uint64_t>(part.block_size(owner)) -
                (halo ? halo->overlap(owner, h) : 0);
    }
  return values;
}

namespace {

std::uint64_t entry_checksum(const RedundancyStore::Entry& e) {
  std::uint64_t h = fnv1a64(&e.j, sizeof e.j);
  h = fnv1a64(&e.beta_prev, sizeof e.beta_prev, h);
  return fnv1a64(e.slice.data(), e.slice.size() * sizeof(double), h);
}

}  // namespace

void RedundancyStore::Entry::seal() { checksum = entry_checksum(*this); }

bool RedundancyStore::Entry::checksum_ok() const {
  return checksum == entry_checksum(*this);
}

void RedundancyStore::store(int owner, std::uint64_t j, double beta_prev,
                            std::span<const double> slice) {
  auto& window = by_owner_[owner];
  if (!window.empty() && window.back().j == j) window.pop_back();  // overwrite
  Entry e;
  e.j = j;
  e.beta_prev = beta_prev;
  e.slice.assign(slice.begin(), slice.end());
  e.seal();
  window.push_back(std::move(e));
  while (window.size() > 2) window.pop_front();
}

std::optional<RecoveryRecord> RedundancyStore::assemble(
    int owner, std::optional<std::uint64_t> max_j) const {
  auto it = by_owner_.find(owner);
  if (it == by_owner_.end() || it->second.size() < 2) return std::nullopt;
  const auto& window = it->second;
  const Entry& prev = window[0];
  const Entry& curr = window[1];
  if (max_j && curr.j > *max_j) return std::nullopt;
  if (prev.j + 1 != curr.j) return std::nullopt;  // non-consecutive pair
  if (!prev.checksum_ok() || !curr.checksum_ok())
    raise(ErrorCode::corrupt_record, "redundancy entry failed checksum");
  RecoveryRecord r;
  r.owner = owner;
  r.j = curr.j;
  r.beta_prev = curr.beta_prev;
  r.p_prev = prev.slice;
  r.p_curr = curr.slice;
  r.seal();
  return r;
}

std::optional<std::uint64_t> RedundancyStore::newest_pair_iteration(
    int owner) const {
  auto it = by_owner_.find(owner);
  if (it == by_owner_.end() || it->second.size() < 2) return std::nullopt;
  const auto& window = it->second;
  if (window[0].j + 1 != window[1].j) return std::nullopt;
  return window[1].j;
}

std::uint64_t RedundancyStore::resident_values() const {
  std::uint64_t total = 0;
  for (const auto& [owner, window] : by_owner_)
    for (const auto& e : window) total += e.slice.size();
  return total;
}

std::size_t RedundancyStore::retained(int owner) const {
  auto it = by_owner_.find(owner);
  return it == by_owner_.end() ? 0 : it->second.size();
}

void RedundancyStore::clear() { by_owner_.clear(); }

void RedundancyStore::corrupt_for_test(int owner, std::size_t which_entry,
                                       std::size_t byte_index) {
  auto& window = by_owner_.at(owner);
  auto& slice = window.at(which_entry).slice;
  auto* bytes = reinterpret_cast<std::uint8_t*>(slice.data());
  bytes[byte_index % (slice.size() * sizeof(double))] ^= 0x40;
}

}  // namespace esr
}  // namespace esrsim
