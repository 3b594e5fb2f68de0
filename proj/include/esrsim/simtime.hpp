// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace esrsim {

/// Simulated-time cost constants. These are abstract units, not
/// calibrated to any hardware; every figure derived from them is
/// labeled "simulated units" by the tools.
struct CostModel {
  std::uint64_t msg_latency = 500;        // per message
  std::uint64_t wire_per_byte = 1;        // network transfer, per byte
  std::uint64_t persist_latency = 2000;   // per durable commit
  std::uint64_t persist_per_byte = 4;     // durable medium, per byte
  std::uint64_t ram_copy_per_byte = 1;    // peer-RAM redundancy copy, per byte
  std::uint64_t reduce_latency = 300;     // per global reduction
  std::uint64_t compute_per_nnz = 2;      // SpMV work, per nonzero
  std::uint64_t spawn_delay = 10000;      // replacement rank startup
  std::uint64_t node_recovery_delay = 50000;  // in-place node revival
};

using SimTime = std::uint64_t;

}  // namespace esrsim
