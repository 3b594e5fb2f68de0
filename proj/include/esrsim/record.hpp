// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace esrsim {
namespace esr {

/// The minimal persisted state of one rank: the two successive search
/// directions spanning one persistence pair, the scalar that couples
/// them, and the iteration the pair ends at. Reconstructing the full
/// solver state of the owner at iteration j needs nothing else beyond
/// the static problem data and the survivors' slices.
struct RecoveryRecord {
  int owner = -1;
  std::uint64_t j = 0;          // iteration of p_curr
  double beta_prev = 0.0;       // beta^(j-1)
  std::vector<double> p_prev;   // p^(j-1) over the owner's block
  std::vector<double> p_curr;   // p^(j)
  std::uint64_t checksum = 0;

  void seal();                  // computes checksum over the payload
  bool checksum_ok() const;

  /// Little-endian byte layout:
  ///   iteration u64, owner u32, slice length u64, beta f64,
  ///   p_prev f64[len], p_curr f64[len], checksum u64.
  /// The checksum is FNV-1a 64 over everything before it.
  std::vector<std::uint8_t> serialize() const;
  static RecoveryRecord deserialize(const std::vector<std::uint8_t>& bytes);

  static std::size_t serialized_size(std::size_t slice_len) {
    return 8 + 4 + 8 + 8 + 16 * slice_len + 8;
  }
};

}  // namespace esr

/// Little-endian packing helpers shared by records and slot files.
namespace wire {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v);
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void put_f64(std::vector<std::uint8_t>& out, double v);

std::uint16_t get_u16(const std::uint8_t* p);
std::uint32_t get_u32(const std::uint8_t* p);
std::uint64_t get_u64(const std::uint8_t* p);
double get_f64(const std::uint8_t* p);

}  // namespace wire
}  // namespace esrsim
