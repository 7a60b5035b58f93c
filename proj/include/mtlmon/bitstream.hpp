// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtlmon/compiler.hpp"

namespace mtlmon {

/// Per-segment bit totals for one fabric configuration.
struct BitCounts {
  std::uint64_t pe_record = 0;  // bits per PE record
  std::uint64_t q_record = 0;   // bits per Que record
  std::uint64_t route_record = 0;  // bits per PE in the AP2PE segment
  std::uint64_t pe_bits = 0;
  std::uint64_t q_bits = 0;
  std::uint64_t route_bits = 0;

  std::uint64_t total() const { return pe_bits + q_bits + route_bits; }
  std::uint64_t bytes() const { return (total() + 7) / 8; }
};

BitCounts bit_counts(const FabricConfig& cfg);

/// MSB-first bit packer.
class BitWriter {
 public:
  // Throws BitstreamError if `value` does not fit in `width` bits.
  void put(std::uint64_t value, unsigned width, const char* field);
  std::uint64_t bit_count() const { return bits_; }
  // Zero-pads to a byte boundary and returns the bytes.
  std::vector<std::uint8_t> finish();

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  // Throws BitstreamError when reading past the end.
  std::uint64_t get(unsigned width);
  std::uint64_t position() const { return pos_; }
  // True when every bit from the current position to the end is zero.
  bool rest_is_zero() const;

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t pos_ = 0;
};

/// Packs PE records, then Que records, then AP2PE routes, then zero
/// padding. Throws BitstreamError on field overflow or a program whose
/// dimensions differ from `cfg`.
std::vector<std::uint8_t> encode_bitstream(const MonitorProgram& prog,
                                           const FabricConfig& cfg);

/// Inverse of encode_bitstream. reported_latency is recomputed from the
/// decoded structure (0 when it has no verdict Que or is malformed).
/// Throws BitstreamError on length mismatch, nonzero padding or an
/// undefined opcode.
MonitorProgram decode_bitstream(std::span<const std::uint8_t> bytes,
                                const FabricConfig& cfg);

inline constexpr std::uint16_t kBitstreamVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;

struct BitstreamFile {
  FabricConfig cfg;
  std::vector<std::uint8_t> body;
};

std::vector<std::uint8_t> encode_header(const FabricConfig& cfg);
// Throws BitstreamError on bad magic, version, reserved bytes or size.
BitstreamFile parse_bitstream_file(std::span<const std::uint8_t> bytes);

// Both throw BitstreamError on I/O failure.
void write_bitstream_file(const std::string& path, const FabricConfig& cfg,
                          std::span<const std::uint8_t> body);
BitstreamFile read_bitstream_file(const std::string& path);

}  // namespace mtlmon
