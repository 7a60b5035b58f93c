// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mtlmon/compiler.hpp"
#include "mtlmon/que.hpp"
#include "mtlmon/trace.hpp"

namespace mtlmon {

/// One PE's write request to its Que in one cycle.
struct PePosting {
  Interval interval;
  bool value = false;
};

/// Coalesced writes to one Que in one cycle.
struct QueWriteBundle {
  std::optional<Interval> top;
  std::optional<Interval> bot;

  bool operator==(const QueWriteBundle&) const = default;
};

/// Merges the postings of one cycle into one interval per polarity.
/// Empty intervals are ignored. Throws WriteConflictFault when a
/// polarity's postings overlap or leave a gap, or when the two coalesced
/// intervals overlap each other.
QueWriteBundle coalesce(std::span<const PePosting> postings);

enum class FabricMode : std::uint8_t { Programming, Running };

/// Cycle-level model of the monitor hardware.
///
/// Per running cycle every PE reads its operands (AP values of this cycle,
/// or the value its source Que deleted in the previous cycle), posts an
/// interval to its Que, and every written Que performs add, the coalesced
/// T-modify, the F-modify and a delete at its head. Deleted values are
/// latched for the readers; the verdict Que's deletion leaves the fabric.
class Fabric {
 public:
  // Throws AllocationError(InvalidConfig) on a zero dimension.
  explicit Fabric(const FabricConfig& cfg);

  const FabricConfig& config() const { return cfg_; }
  FabricMode mode() const { return mode_; }
  // Every cycle since construction, programming cycles included.
  std::uint64_t cycle() const { return cycle_; }
  // Cycles since the last program latched.
  std::uint64_t running_cycle() const { return running_cycle_; }
  // Bytes (and so cycles) needed to load a program.
  std::size_t program_bytes() const { return program_bytes_; }

  // Enters Programming mode and discards any partially shifted program.
  void begin_reprogram();
  // Consumes one cycle. After the last byte the program is decoded,
  // validated and latched, all ques are cleared and the fabric runs.
  // Throws ProtocolError in Running mode; BitstreamError or ProgramError
  // for a bad program, after which the port is ready for a fresh load.
  void load_program_byte(std::uint8_t byte);
  // begin_reprogram followed by every byte of `body`.
  void load_program(std::span<const std::uint8_t> body);

  // One monitor cycle. Throws ProtocolError in Programming mode,
  // TraceError if ap_values.size() != nAP, and Fault subclasses on
  // hardware invariant violations.
  std::optional<Verdict> step(const std::vector<bool>& ap_values);

  const MonitorProgram& program() const { return program_; }
  std::uint32_t latency() const { return program_.reported_latency; }

  // Contents of Que `q` as a queue of capacity head + 1.
  QueState que_state(std::uint32_t q) const;
  // Value Que `q` deleted in the last cycle, if any.
  std::optional<bool> q2pe_latch(std::uint32_t q) const { return latch_.at(q); }
  // Bundle applied to Que `q` in the last cycle.
  const QueWriteBundle& last_bundle(std::uint32_t q) const {
    return bundles_.at(q);
  }

  // Equality of everything that influences future behavior; cycle
  // counters since construction are excluded.
  bool same_state(const Fabric& other) const;

 private:
  enum class Slot : std::uint8_t { Empty = 0, Top = 1, Bot = 2, Maybe = 3 };

  void latch_program();
  void clear_datapath();
  void que_add(std::uint32_t q);
  void que_modify(std::uint32_t q, Interval iv, Slot to);
  std::optional<bool> que_del(std::uint32_t q);

  FabricConfig cfg_;
  FabricMode mode_ = FabricMode::Programming;
  std::uint64_t cycle_ = 0;
  std::uint64_t running_cycle_ = 0;
  std::size_t program_bytes_ = 0;
  std::vector<std::uint8_t> shift_;

  MonitorProgram program_;
  std::vector<std::vector<ResolvedOperand>> operands_;
  std::vector<std::vector<Slot>> ques_;
  std::vector<std::optional<bool>> latch_;
  std::vector<QueWriteBundle> bundles_;
};

}  // namespace mtlmon
