// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "esrsim/error.hpp"

namespace esrsim {
namespace linalg {

/// Fixed-order dot product: a single accumulator walks the entries
/// left to right. Every global reduction in the solver is expressed in
/// this order (rank-major, then index-major over contiguous ascending
/// blocks), so results are bitwise independent of the rank count.
inline double dot(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    raise(ErrorCode::shape_mismatch, "dot operands differ in length");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size())
    raise(ErrorCode::shape_mismatch, "axpy operands differ in length");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace linalg

/// 64-bit FNV-1a, the integrity code used by recovery records and slot
/// files.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace esrsim
