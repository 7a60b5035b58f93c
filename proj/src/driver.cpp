// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/driver.hpp"

#include <map>
#include <sstream>

#include "mtlmon/bitstream.hpp"
#include "mtlmon/errors.hpp"
#include "mtlmon/oracle.hpp"

namespace mtlmon {

bool RunReport::steady_throughput() const {
  if (constant) return true;
  for (std::size_t c = 0; c < emitted.size(); ++c) {
    if (emitted[c] != (c >= reported_latency)) return false;
  }
  return true;
}

void run_trace(Fabric& fabric, const Trace& trace, RunReport& report) {
  if (trace.width() != fabric.config().n_ap) {
    throw TraceError("trace has " + std::to_string(trace.width()) +
                     " APs, fabric has " +
                     std::to_string(fabric.config().n_ap));
  }
  for (std::size_t i = 0; i < trace.length(); ++i) {
    auto v = fabric.step(trace.event(i));
    report.emitted.push_back(v.has_value());
    if (v) report.verdicts.push_back(*v);
    ++report.run_cycles;
  }
}

std::vector<Mismatch> compare(const VerdictStream& oracle,
                              std::span<const Verdict> actual,
                              std::size_t trace_length,
                              std::uint32_t latency) {
  const std::size_t produced =
      trace_length > latency ? trace_length - latency : 0;
  const std::size_t bound = std::min(oracle.size(), produced);

  std::map<std::uint64_t, bool> got;
  std::vector<Mismatch> out;
  for (const auto& v : actual) {
    if (v.time >= bound || !got.emplace(v.time, v.value).second) {
      out.push_back({v.time, std::nullopt, v.value});
    }
  }
  for (std::uint64_t t = 0; t < bound; ++t) {
    auto it = got.find(t);
    if (it == got.end()) {
      out.push_back({t, oracle.values[t], std::nullopt});
    } else if (it->second != oracle.values[t]) {
      out.push_back({t, oracle.values[t], it->second});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Mismatch& a, const Mismatch& b) {
                     return a.time < b.time;
                   });
  return out;
}

Trace widen(const Trace& trace, std::size_t width) {
  if (trace.width() > width) {
    throw TraceError("trace has " + std::to_string(trace.width()) +
                     " APs, fabric has " + std::to_string(width));
  }
  Trace out(width);
  for (std::size_t i = 0; i < trace.length(); ++i) {
    auto e = trace.event(i);
    e.resize(width, false);
    out.push_back(std::move(e));
  }
  return out;
}

RunReport check_formula(const Formula& f, const FabricConfig& cfg,
                        const Trace& trace,
                        std::span<const HeadOverride> overrides) {
  RunReport report;
  report.formula = to_string(f);
  report.cfg = cfg;
  const FoldResult folded = constant_fold(f);
  if (folded.is_constant()) {
    const VerdictStream expected = oracle_verdicts(f, trace);
    report.constant = folded.constant_value;
    for (std::size_t t = 0; t < expected.size(); ++t) {
      report.verdicts.push_back({t, folded.constant_value});
    }
    report.mismatches =
        compare(expected, report.verdicts, expected.size(), 0);
    return report;
  }

  const Compilation c = compile(*folded.formula, cfg, overrides);
  const auto body = encode_bitstream(c.program, cfg);
  Fabric fabric(cfg);
  fabric.load_program(body);
  report.programming_cycles = fabric.cycle();
  report.reported_latency = fabric.latency();
  run_trace(fabric, widen(trace, cfg.n_ap), report);
  report.mismatches = compare(oracle_verdicts(*folded.formula, trace),
                              report.verdicts, trace.length(),
                              report.reported_latency);
  return report;
}

// ---------------------------------------------------------------------------
// Fuzzing

std::string FuzzSummary::to_string() const {
  std::ostringstream s;
  s << "iterations=" << iterations << " formulas=" << formulas
    << " passed=" << passed << " failed=" << failed
    << " mismatches=" << mismatches << " write_conflicts=" << write_conflicts
    << " maybe_faults=" << maybe_faults << " other_errors=" << other_errors
    << " throughput_violations=" << throughput_violations
    << " reprogram_divergences=" << reprogram_divergences
    << " resamples=" << resamples;
  return s.str();
}

namespace {

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

Formula leaf(std::mt19937_64& rng, std::uint32_t max_depth,
             std::uint32_t ap_count) {
  if (max_depth > 1 && below(rng, 100) < 5) return Formula::make_true();
  return Formula::make_ap(static_cast<std::uint32_t>(below(rng, ap_count)));
}

Formula grow(std::mt19937_64& rng, std::uint32_t levels,
             std::uint32_t max_depth, std::uint32_t max_t2,
             std::uint32_t ap_count) {
  auto child = [&] {
    if (levels == 1 || below(rng, 10) < 3) {
      return leaf(rng, max_depth, ap_count);
    }
    return grow(rng, levels - 1, max_depth, max_t2, ap_count);
  };
  auto bounds = [&](bool zero_lo) {
    const auto t2 = static_cast<std::uint32_t>(below(rng, max_t2 + 1));
    const auto t1 =
        zero_lo ? 0u : static_cast<std::uint32_t>(below(rng, t2 + 1));
    return std::make_pair(t1, t2);
  };

  const auto pick = below(rng, 100);
  if (pick < 10) return Formula::make_not(child());
  if (pick < 40) {
    Formula a = child();
    Formula b = child();
    if (pick < 20) return Formula::make_and(a, b);
    if (pick < 30) return Formula::make_or(a, b);
    return Formula::make_implies(a, b);
  }
  if (pick < 55) return Formula::make_next(child());
  if (pick < 70) {
    auto [t1, t2] = bounds(false);
    return Formula::make_box(child(), t1, t2);
  }
  if (pick < 85) {
    auto [t1, t2] = bounds(false);
    return Formula::make_diamond(child(), t1, t2);
  }
  const bool zero_lo = below(rng, 2) == 0;
  auto [t1, t2] = bounds(zero_lo);
  Formula a = child();
  Formula b = child();
  return Formula::make_until(a, b, t1, t2);
}

Trace random_trace(std::mt19937_64& rng, std::size_t width,
                   std::size_t length) {
  Trace t(width);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<bool> e(width);
    for (std::size_t k = 0; k < width; ++k) e[k] = below(rng, 2) == 1;
    t.push_back(std::move(e));
  }
  return t;
}

// A formula that compiles on the fabric and is not constant.
Compilation draw(std::mt19937_64& rng, const FuzzOptions& o,
                 FuzzSummary& s) {
  for (;;) {
    Formula f = random_formula(rng, o.max_depth, o.max_t2, o.ap_count);
    FoldResult folded = constant_fold(f);
    if (!folded.is_constant()) {
      try {
        Compilation c = compile(*folded.formula, o.cfg);
        return c;
      } catch (const AllocationError&) {
      }
    }
    ++s.resamples;
  }
}

}  // namespace

Formula random_formula(std::mt19937_64& rng, std::uint32_t max_depth,
                       std::uint32_t max_t2, std::uint32_t ap_count) {
  if (max_depth == 0 || ap_count == 0) {
    throw std::invalid_argument("depth and AP bounds must be at least 1");
  }
  return grow(rng, max_depth, max_depth, max_t2, ap_count);
}

FuzzSummary fuzz(const FuzzOptions& opts) {
  FuzzOptions o = opts;
  o.ap_count = std::min(o.ap_count, o.cfg.n_ap);
  std::mt19937_64 rng(o.seed);
  FuzzSummary s;

  auto note = [&](std::size_t iter, const std::string& what) {
    if (s.failures.size() < 10) {
      s.failures.push_back("iteration " + std::to_string(iter) + ": " + what);
    }
  };

  for (std::size_t iter = 0; iter < o.count; ++iter) {
    ++s.iterations;
    const Compilation a = draw(rng, o, s);
    const Compilation b = draw(rng, o, s);
    const Trace ta = random_trace(rng, o.cfg.n_ap, o.trace_length);
    const Trace tb = random_trace(rng, o.cfg.n_ap, o.trace_length);
    const auto body_a = encode_bitstream(a.program, o.cfg);
    const auto body_b = encode_bitstream(b.program, o.cfg);

    Fabric fabric(o.cfg);
    std::vector<Verdict> reprogrammed_b;
    bool b_ran = false;
    for (int phase = 0; phase < 2; ++phase) {
      const Compilation& c = phase == 0 ? a : b;
      const Trace& t = phase == 0 ? ta : tb;
      ++s.formulas;
      RunReport r;
      r.reported_latency = c.program.reported_latency;
      try {
        fabric.load_program(phase == 0 ? body_a : body_b);
        run_trace(fabric, t, r);
        r.mismatches = compare(oracle_verdicts(c.source, t), r.verdicts,
                               t.length(), fabric.latency());
        bool pass = true;
        if (!r.ok()) {
          s.mismatches += r.mismatches.size();
          note(iter, "mismatch on " + to_string(c.source));
          pass = false;
        }
        if (!r.steady_throughput()) {
          ++s.throughput_violations;
          note(iter, "throughput on " + to_string(c.source));
          pass = false;
        }
        ++(pass ? s.passed : s.failed);
        if (phase == 1) {
          reprogrammed_b = r.verdicts;
          b_ran = true;
        }
      } catch (const WriteConflictFault& e) {
        ++s.write_conflicts;
        ++s.failed;
        note(iter, to_string(c.source) + ": " + e.what());
      } catch (const StabilityFault& e) {
        ++s.maybe_faults;
        ++s.failed;
        note(iter, to_string(c.source) + ": " + e.what());
      } catch (const Error& e) {
        ++s.other_errors;
        ++s.failed;
        note(iter, to_string(c.source) + ": " + e.what());
      }
    }

    if (!b_ran) continue;
    try {
      Fabric fresh(o.cfg);
      fresh.load_program(body_b);
      RunReport r;
      run_trace(fresh, tb, r);
      if (r.verdicts != reprogrammed_b || !fresh.same_state(fabric)) {
        ++s.reprogram_divergences;
        note(iter, "reprogrammed fabric diverges from a fresh one");
      }
    } catch (const Error& e) {
      ++s.reprogram_divergences;
      note(iter, std::string("fresh replay failed: ") + e.what());
    }
  }
  return s;
}

}  // namespace mtlmon
