// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#include "esrsim/slot_file.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "esrsim/error.hpp"
#include "esrsim/record.hpp"
#include "esrsim/vecops.hpp"

namespace esrsim {
namespace rma {

std::vector<std::uint8_t> encode_slot_header(const SlotHeader& h) {
  std::vector<std::uint8_t> out;
  out.reserve(SlotHeader::kSize);
  out.insert(out.end(), SlotHeader::kMagic, SlotHeader::kMagic + 4);
  wire::put_u16(out, h.version);
  wire::put_u64(out, h.iteration);
  wire::put_u32(out, h.owner);
  wire::put_u64(out, h.payload_len);
  wire::put_u64(out, h.generation);
  wire::put_u64(out, h.checksum);
  return out;
}

std::optional<SlotHeader> decode_slot_header(const std::uint8_t* bytes,
                                             std::size_t len) {
  if (len < SlotHeader::kSize) return std::nullopt;
  if (std::memcmp(bytes, SlotHeader::kMagic, 4) != 0) return std::nullopt;
  SlotHeader h;
  h.version = wire::get_u16(bytes + 4);
  if (h.version != 1) return std::nullopt;
  h.iteration = wire::get_u64(bytes + 6);
  h.owner = wire::get_u32(bytes + 14);
  h.payload_len = wire::get_u64(bytes + 18);
  h.generation = wire::get_u64(bytes + 26);
  h.checksum = wire::get_u64(bytes + 34);
  return h;
}

std::uint64_t slot_checksum(const std::vector<std::uint8_t>& payload,
                            const SlotHeader& h) {
  const auto hdr = encode_slot_header(h);
  std::uint64_t c = fnv1a64(payload.data(), payload.size());
  // Continue over the header fields preceding the checksum.
  return fnv1a64(hdr.data(), SlotHeader::kSize - 8, c);
}

namespace {

std::optional<SlotPairFile::Recovered> read_slot(
    const std::filesystem::path& path, int slot) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::uint8_t hdr_bytes[SlotHeader::kSize];
  if (!in.read(reinterpret_cast<char*>(hdr_bytes), SlotHeader::kSize))
    return std::nullopt;
  auto h = decode_slot_header(hdr_bytes, SlotHeader::kSize);
  if (!h) return std::nullopt;
  if (h->payload_len > (1ull << 32)) return std::nullopt;
  std::vector<std::uint8_t> payload(h->payload_len);
  if (h->payload_len > 0 &&
      !in.read(reinterpret_cast<char*>(payload.data()), h->payload_len))
    return std::nullopt;
  if (slot_checksum(payload, *h) != h->checksum) return std::nullopt;
  return SlotPairFile::Recovered{*h, std::move(payload), slot};
}

void write_at(std::fstream& f, std::uint64_t offset, const std::uint8_t* data,
              std::size_t len) {
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}

}  // namespace

SlotPairFile SlotPairFile::open(const std::filesystem::path& dir,
                                const std::string& base) {
  std::filesystem::create_directories(dir);
  SlotPairFile p;
  p.paths_[0] = dir / (base + ".slot0");
  p.paths_[1] = dir / (base + ".slot1");
  std::uint64_t max_gen = 0;
  for (int s = 0; s < 2; ++s) {
    if (auto r = read_slot(p.paths_[s], s)) {
      if (r->header.generation >= max_gen) {
        max_gen = r->header.generation;
        p.active_slot_ = s;
      }
    }
  }
  p.next_generation_ = max_gen + 1;
  return p;
}

bool SlotPairFile::commit(std::uint64_t iteration, std::uint32_t owner,
                          const std::vector<std::uint8_t>& payload,
                          std::size_t crash_cut) {
  const int slot = active_slot_ == 0 ? 1 : 0;  // inactive slot, slot 0 first

  SlotHeader h;
  h.iteration = iteration;
  h.owner = owner;
  h.payload_len = payload.size();
  h.generation = next_generation_;
  h.checksum = slot_checksum(payload, h);
  const auto hdr = encode_slot_header(h);

  std::fstream f(paths_[slot],
                 std::ios::binary | std::ios::in | std::ios::out);
  if (!f) {
    f.open(paths_[slot], std::ios::binary | std::ios::out);
    f.close();
    f.open(paths_[slot], std::ios::binary | std::ios::in | std::ios::out);
  }
  if (!f) raise(ErrorCode::io_failure, "cannot open slot file");

  // Payload first, barrier, then header. crash_cut counts bytes of this
  // logical sequence actually reaching the medium.
  const std::size_t pay_bytes = std::min(crash_cut, payload.size());
  if (pay_bytes > 0) write_at(f, SlotHeader::kSize, payload.data(), pay_bytes);
  f.flush();
  if (crash_cut > payload.size()) {
    const std::size_t hdr_bytes =
        std::min(crash_cut - payload.size(), SlotHeader::kSize);
    write_at(f, 0, hdr.data(), hdr_bytes);
    f.flush();
  }

  // A truncated sequence leaves the partner slot authoritative; the
  // generation is reused by the next attempt over the same torn slot.
  if (crash_cut < sequence_length(payload.size())) return false;
  active_slot_ = slot;
  ++next_generation_;
  return true;
}

std::optional<SlotPairFile::Recovered> SlotPairFile::recover() const {
  std::optional<Recovered> best;
  for (int s = 0; s < 2; ++s) {
    auto r = read_slot(paths_[s], s);
    if (r && (!best || r->header.generation > best->header.generation))
      best = std::move(r);
  }
  return best;
}

std::vector<SlotPairFile::Recovered> SlotPairFile::recover_all() const {
  std::vector<Recovered> out;
  for (int s = 0; s < 2; ++s)
    if (auto r = read_slot(paths_[s], s)) out.push_back(std::move(*r));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.header.generation > b.header.generation;
  });
  return out;
}

std::uint64_t SlotPairFile::bytes_on_medium() const {
  std::uint64_t total = 0;
  for (int s = 0; s < 2; ++s) {
    std::error_code ec;
    const auto sz = std::filesystem::file_size(paths_[s], ec);
    if (!ec) total += sz;
  }
  return total;
}

}  // namespace rma
}  // namespace esrsim
