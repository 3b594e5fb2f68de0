// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/report.hpp"

#include <cstdio>
#include <sstream>

namespace esrsim {
namespace cluster {

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iter: return "max_iter";
    case RunStatus::unrecoverable: return "unrecoverable";
    case RunStatus::capacity_exceeded: return "capacity_exceeded";
  }
  return "?";
}

std::string hex_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string ReportLine::render() const {
  std::ostringstream os;
  os << kind << ' ' << iter << ' ' << rank << ' ' << bytes << ' ' << time;
  for (const auto& [k, v] : extras) os << ' ' << k << '=' << v;
  return os.str();
}

std::string RunReport::serialize() const {
  std::ostringstream os;
  for (const auto& line : lines) os << line.render() << '\n';
  os << "ledger -1 -1 " << ledger.wire_bytes_total() << ' '
     << ledger.persist_simtime_total
     << " ram_compute_values=" << ledger.ram_compute_values
     << " ram_redundancy_values=" << ledger.ram_redundancy_values
     << " nvm_resident_values=" << ledger.nvm_resident_values
     << " nvm_written_values_total=" << ledger.nvm_written_values_total
     << " nvm_bytes_written_total=" << ledger.nvm_bytes_written_total
     << " pairs=" << ledger.pairs_completed
     << " members=" << ledger.persist_members_executed
     << " halo_values_total=" << ledger.wire_halo_values_total << '\n';
  os << "end -1 -1 0 0 status=" << to_string(status)
     << " iterations=" << iterations << " rel_residual="
     << hex_double(rel_residual) << " recoveries=" << recoveries.size()
     << '\n';
  return os.str();
}

}  // namespace cluster
}  // namespace esrsim
