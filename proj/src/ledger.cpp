// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/ledger.hpp"

#include <sstream>

#include "esrsim/error.hpp"

namespace esrsim {

const char* to_string(RecoveryMode m) {
  switch (m) {
    case RecoveryMode::none: return "none";
    case RecoveryMode::esr_inmem: return "esr_inmem";
    case RecoveryMode::nvm_local: return "nvm_local";
    case RecoveryMode::nvm_prd: return "nvm_prd";
  }
  return "?";
}

RecoveryMode recovery_mode_from_string(const std::string& s) {
  if (s == "none") return RecoveryMode::none;
  if (s == "esr_inmem") return RecoveryMode::esr_inmem;
  if (s == "nvm_local") return RecoveryMode::nvm_local;
  if (s == "nvm_prd") return RecoveryMode::nvm_prd;
  raise(ErrorCode::invalid_config, "unknown recovery mode '" + s + "'");
}

std::uint64_t PersistSchedule::members_up_to(std::uint64_t last_iter) const {
  std::uint64_t count = 0;
  for (std::uint64_t j = 1; j <= last_iter; ++j)
    if (is_member(j)) ++count;
  return count;
}

std::uint64_t PersistSchedule::pairs_up_to(std::uint64_t last_iter) const {
  std::uint64_t count = 0;
  for (std::uint64_t j = 2; j <= last_iter; ++j)
    if (is_pair_close(j)) ++count;
  return count;
}

std::string OverheadLedger::pretty() const {
  std::ostringstream os;
  os << "mode=" << to_string(mode) << " n=" << n << " nnz=" << nnz
     << " proc=" << proc << " c=" << c << " period=" << persist_period << "\n"
     << "ram_compute_values=" << ram_compute_values
     << " ram_redundancy_values=" << ram_redundancy_values
     << " ram_total_bytes=" << ram_total_bytes() << "\n"
     << "nvm_resident_values=" << nvm_resident_values
     << " nvm_written_values_per_persist=" << nvm_written_values_per_persist
     << " nvm_slot_bytes_resident=" << nvm_slot_bytes_resident
     << " nvm_bytes_written_total=" << nvm_bytes_written_total << "\n"
     << "wire_halo_values_per_iter=" << wire_halo_values_per_iter
     << " wire_redundancy_values_per_persist="
     << wire_redundancy_values_per_persist
     << " wire_bytes_total=" << wire_bytes_total() << "\n"
     << "iterations=" << iterations_executed << " pairs=" << pairs_completed
     << " recoveries=" << recoveries
     << " persist_simtime_total=" << persist_simtime_total
     << " (simulated units)";
  return os.str();
}

}  // namespace esrsim
