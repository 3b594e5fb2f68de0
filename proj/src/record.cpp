// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/record.hpp"

#include <cstring>

#include "esrsim/error.hpp"
#include "esrsim/vecops.hpp"

namespace esrsim {

namespace wire {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const std::uint8_t* p) {
  const std::uint64_t bits = get_u64(p);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace wire

namespace esr {

namespace {

std::vector<std::uint8_t> body_bytes(const RecoveryRecord& r) {
  std::vector<std::uint8_t> out;
  out.reserve(RecoveryRecord::serialized_size(r.p_prev.size()) - 8);
  wire::put_u64(out, r.j);
  wire::put_u32(out, static_cast<std::uint32_t>(r.owner));
  wire::put_u64(out, r.p_prev.size());
  wire::put_f64(out, r.beta_prev);
  for (double v : r.p_prev) wire::put_f64(out, v);
  for (double v : r.p_curr) wire::put_f64(out, v);
  return out;
}

}  // namespace

void RecoveryRecord::seal() {
  if (p_prev.size() != p_curr.size())
    raise(ErrorCode::shape_mismatch, "record slice lengths differ");
  const auto body = body_bytes(*this);
  checksum = fnv1a64(body.data(), body.size());
}

bool RecoveryRecord::checksum_ok() const {
  if (p_prev.size() != p_curr.size()) return false;
  const auto body = body_bytes(*this);
  return checksum == fnv1a64(body.data(), body.size());
}

std::vector<std::uint8_t> RecoveryRecord::serialize() const {
  auto out = body_bytes(*this);
  wire::put_u64(out, checksum);
  return out;
}

RecoveryRecord RecoveryRecord::deserialize(
    const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < serialized_size(0))
    raise(ErrorCode::corrupt_record, "record truncated");
  RecoveryRecord r;
  const std::uint8_t* p = bytes.data();
  r.j = wire::get_u64(p); p += 8;
  r.owner = static_cast<int>(wire::get_u32(p)); p += 4;
  const std::uint64_t len = wire::get_u64(p); p += 8;
  if (bytes.size() != serialized_size(len))
    raise(ErrorCode::corrupt_record, "record length mismatch");
  r.beta_prev = wire::get_f64(p); p += 8;
  r.p_prev.resize(len);
  for (std::uint64_t i = 0; i < len; ++i) { r.p_prev[i] = wire::get_f64(p); p += 8; }
  r.p_curr.resize(len);
  for (std::uint64_t i = 0; i < len; ++i) { r.p_curr[i] = wire::get_f64(p); p += 8; }
  r.checksum = wire::get_u64(p);
  if (!r.checksum_ok())
    raise(ErrorCode::corrupt_record, "record checksum mismatch");
  return r;
}

}  // namespace esr
}  // namespace esrsim
