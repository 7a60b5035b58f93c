// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mtlmon/compiler.hpp"
#include "mtlmon/fabric.hpp"
#include "mtlmon/formula.hpp"
#include "mtlmon/trace.hpp"

namespace mtlmon {

/// A time at which the fabric and the oracle disagree. An unset side means
/// that side produced no verdict for the time.
struct Mismatch {
  std::uint64_t time = 0;
  std::optional<bool> expected;
  std::optional<bool> actual;

  bool operator==(const Mismatch&) const = default;
};

struct RunReport {
  std::string formula;
  FabricConfig cfg;
  std::uint32_t reported_latency = 0;
  std::optional<bool> constant;  // set when the formula folded to a constant
  std::vector<Verdict> verdicts;
  std::vector<bool> emitted;  // per running step: did a verdict leave?
  std::vector<Mismatch> mismatches;
  std::uint64_t programming_cycles = 0;
  std::uint64_t run_cycles = 0;

  bool ok() const { return mismatches.empty(); }
  // True when verdicts leave on exactly the steps at or after the latency.
  bool steady_throughput() const;
};

/// Steps a Running fabric once per trace event. Trace width must equal
/// nAP. Fills verdicts, emitted and run_cycles of `report`.
void run_trace(Fabric& fabric, const Trace& trace, RunReport& report);

/// Mismatches over every time both sides are required to cover: times
/// below min(oracle size, trace_length - latency). Verdicts outside that
/// range or repeated are reported with no expected value.
std::vector<Mismatch> compare(const VerdictStream& oracle,
                              std::span<const Verdict> actual,
                              std::size_t trace_length, std::uint32_t latency);

/// Trace widened with zero columns to `width`. Throws TraceError if the
/// trace is already wider.
Trace widen(const Trace& trace, std::size_t width);

/// Compile, load into a fresh fabric byte by byte, run, and diff against
/// oracle_verdicts of the folded formula. Constant formulas skip the
/// fabric and are compared over the original formula's range.
RunReport check_formula(const Formula& f, const FabricConfig& cfg,
                        const Trace& trace,
                        std::span<const HeadOverride> overrides = {});

struct FuzzOptions {
  std::uint64_t seed = 1;
  std::size_t count = 100;
  std::uint32_t max_depth = 4;
  std::uint32_t max_t2 = 8;
  std::size_t trace_length = 64;
  std::uint32_t ap_count = 4;
  FabricConfig cfg;
};

struct FuzzSummary {
  std::size_t iterations = 0;
  std::size_t formulas = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t mismatches = 0;
  std::size_t write_conflicts = 0;
  std::size_t maybe_faults = 0;
  std::size_t other_errors = 0;
  std::size_t throughput_violations = 0;
  std::size_t reprogram_divergences = 0;
  std::size_t resamples = 0;
  std::vector<std::string> failures;  // first few, for diagnostics

  bool ok() const {
    return failed == 0 && write_conflicts == 0 && maybe_faults == 0 &&
           other_errors == 0 && throughput_violations == 0 &&
           reprogram_divergences == 0;
  }
  std::string to_string() const;
};

/// Random formula with operator depth in [1, max_depth], intervals with
/// t2 <= max_t2 and APs below ap_count. The root is always an operator.
Formula random_formula(std::mt19937_64& rng, std::uint32_t max_depth,
                       std::uint32_t max_t2, std::uint32_t ap_count);

/// Each iteration programs a fabric with formula A, runs a trace, then
/// reprograms it to formula B mid-run and runs a second trace; both
/// phases are checked against the oracle and B is replayed on a fresh
/// fabric to confirm history independence.
FuzzSummary fuzz(const FuzzOptions& opts);

}  // namespace mtlmon
