// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/halo.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace esrsim {
namespace cluster {

HaloPlan::HaloPlan(const linalg::CsrMatrix& a, const linalg::Partition& part)
    : part_(part) {
  std::map<std::pair<int, int>, std::set<std::int64_t>> need;  // (owner, needer)
  for (int d = 0; d < part.proc; ++d) {
    const std::int64_t lo = part.block_begin(d), hi = part.block_end(d);
    for (std::int64_t r = lo; r < hi; ++r)
      for (std::int64_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
        const std::int64_t col = a.col_indices[k];
        if (col < lo || col >= hi) need[{part.owner(col), d}].insert(col);
      }
  }
  for (auto& [key, cols] : need) {
    Message m;
    m.owner = key.first;
    m.needer = key.second;
    m.cols.assign(cols.begin(), cols.end());
    total_values_ += m.cols.size();
    messages_.push_back(std::move(m));
  }
}

std::uint64_t HaloPlan::overlap(int owner, int needer) const {
  for (const auto& m : messages_)
    if (m.owner == owner && m.needer == needer) return m.cols.size();
  return 0;
}

}  // namespace cluster
}  // namespace esrsim
