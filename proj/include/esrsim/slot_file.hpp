// Copyright (c) 2026 The esrsim Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace esrsim {
namespace rma {

/// Header of one durable slot, 42 bytes little-endian:
///   magic "ESRW" (4) | version u16 | iteration u64 | owner u32 |
///   payload length u64 | generation u64 | checksum u64
/// The checksum is FNV-1a 64 over the payload bytes followed by the
/// header bytes up to (and excluding) the checksum field.
struct SlotHeader {
  std::uint16_t version = 1;
  std::uint64_t iteration = 0;
  std::uint32_t owner = 0;
  std::uint64_t payload_len = 0;
  std::uint64_t generation = 0;
  std::uint64_t checksum = 0;

  static constexpr std::size_t kSize = 42;
  static constexpr char kMagic[4] = {'E', 'S', 'R', 'W'};
};

/// A pair of alternately written slot files. A commit writes the
/// payload first, flushes, then writes the header; the active slot
/// flips only when the full sequence reached the medium. `crash_cut`
/// truncates the write sequence after that many bytes, emulating a
/// power failure mid-persist: the partner slot still holds the
/// previous complete record.
class SlotPairFile {
 public:
  SlotPairFile() = default;

  /// Opens (or creates) the pair under `dir` with file names
  /// `<base>.slot0` / `<base>.slot1`, restoring generation and active
  /// slot from whatever valid content is on the medium.
  static SlotPairFile open(const std::filesystem::path& dir,
                           const std::string& base);

  /// Total byte length of the durable write sequence for a payload.
  static std::size_t sequence_length(std::size_t payload_len) {
    return payload_len + SlotHeader::kSize;
  }

  /// Writes payload+header to the inactive slot. Returns true when the
  /// full sequence was persisted (active slot flips); false when
  /// crash_cut stopped it short, leaving the partner slot as the
  /// newest complete record.
  bool commit(std::uint64_t iteration, std::uint32_t owner,
              const std::vector<std::uint8_t>& payload,
              std::size_t crash_cut = SIZE_MAX);

  /// Newest checksum-valid slot content, or nullopt when neither slot
  /// holds a complete record.
  struct Recovered {
    SlotHeader header;
    std::vector<std::uint8_t> payload;
    int slot = -1;
  };
  std::optional<Recovered> recover() const;

  /// All checksum-valid slots, newest generation first.
  std::vector<Recovered> recover_all() const;

  std::uint64_t next_generation() const { return next_generation_; }
  int active_slot() const { return active_slot_; }
  std::uint64_t bytes_on_medium() const;
  const std::filesystem::path& slot_path(int slot) const { return paths_[slot]; }

 private:
  std::filesystem::path paths_[2];
  int active_slot_ = -1;       // -1 until a first successful commit is found
  std::uint64_t next_generation_ = 1;
};

std::vector<std::uint8_t> encode_slot_header(const SlotHeader& h);
std::optional<SlotHeader> decode_slot_header(const std::uint8_t* bytes,
                                             std::size_t len);
std::uint64_t slot_checksum(const std::vector<std::uint8_t>& payload,
                            const SlotHeader& h);

}  // namespace rma
}  // namespace esrsim
