// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "mtlmon/bitstream.hpp"
#include "mtlmon/compiler.hpp"
#include "mtlmon/driver.hpp"
#include "mtlmon/fabric.hpp"
#include "mtlmon/machine.hpp"
#include "mtlmon/oracle.hpp"

using namespace mtlmon;

namespace {

using Clock = std::chrono::steady_clock;
constexpr bool T = true;
constexpr bool F = false;

const char* kTwoDiamonds = "F[0,1] !ap1 | F[1,4] ap2";

struct Outcome {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void report(int n, double limit_ms, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  if (ms > limit_ms) {
    o.expect(false, "took longer than " + std::to_string(limit_ms) + " ms");
  }
  if (!o.ok) ++failures;
  std::printf("criterion %d: %s (%.3f ms, limit %.0f ms)%s%s\n", n,
              o.ok ? "PASS" : "FAIL", ms, limit_ms, o.ok ? "" : " ",
              o.detail.c_str());
}

std::string cells(const QueState& s) {
  std::string out;
  for (Cell c : s.cells()) out += cell_symbol(c);
  return out;
}

Trace random_trace(std::mt19937_64& rng, std::size_t width, std::size_t len) {
  Trace t(width);
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<bool> e(width);
    for (std::size_t k = 0; k < width; ++k) e[k] = rng() & 1u;
    t.push_back(e);
  }
  return t;
}

Outcome negation_golden() {
  Outcome o;
  const auto em = em_build(Operator::Not, 0, 0, 1);
  QueState s(em.head + 1);
  const bool in[] = {T, F, F};
  const char* add[] = {"M", "MF", "MT"};
  const char* mod[] = {"F", "TF", "TT"};
  const char* del[] = {"F", "T", "T"};
  const std::optional<bool> verdict[] = {std::nullopt, F, T};
  for (int t = 0; t < 3; ++t) {
    const EmStep st = em_step(em, s, in[t], std::nullopt);
    const std::string at = " at step " + std::to_string(t);
    o.expect(cells(st.after_add) == add[t], "add" + at);
    o.expect(cells(st.after_modify) == mod[t], "modify" + at);
    o.expect(cells(st.after_del) == del[t], "del" + at);
    o.expect(st.verdict == verdict[t], "verdict" + at);
    s = st.after_del;
  }
  return o;
}

Outcome until_golden() {
  Outcome o;
  const auto em = em_build(Operator::Until, 1, 2, 3);
  QueState s(em.head + 1);
  const bool a0[] = {F, T, T, F, T};
  const bool a1[] = {F, F, F, T, T};
  const char* add[] = {"M", "MF", "MMF", "MMMF", "MFTT"};
  const char* mod[] = {"F", "MF", "MMF", "FTTF", "MFTT"};
  const char* del[] = {"F", "MF", "MMF", "FTT", "MFT"};
  const std::optional<bool> verdict[] = {std::nullopt, std::nullopt,
                                         std::nullopt, F, T};
  for (int t = 0; t < 5; ++t) {
    const EmStep st = em_step(em, s, a0[t], a1[t]);
    const std::string at = " at step " + std::to_string(t);
    o.expect(cells(st.after_add) == add[t], "add" + at);
    o.expect(cells(st.after_modify) == mod[t], "modify" + at);
    o.expect(cells(st.after_del) == del[t], "del" + at);
    o.expect(st.verdict == verdict[t], "verdict" + at);
    s = st.after_del;
  }
  return o;
}

Outcome reasoning_table() {
  Outcome o;
  using O = std::optional<bool>;
  using Write = std::tuple<bool, std::uint32_t, std::uint32_t>;
  struct Row {
    Operator op;
    std::uint32_t t1, t2;
    bool a0;
    O a1;
    std::vector<Write> expected;
  };
  const std::uint32_t a = 2;
  const std::uint32_t b = 5;
  const std::vector<Row> rows = {
      {Operator::Not, 0, 0, F, {}, {{T, 0, 0}}},
      {Operator::Not, 0, 0, T, {}, {{F, 0, 0}}},
      {Operator::Or, 0, 0, F, F, {{F, 0, 0}}},
      {Operator::Or, 0, 0, F, T, {{T, 0, 0}}},
      {Operator::Or, 0, 0, T, F, {{T, 0, 0}}},
      {Operator::Or, 0, 0, T, T, {{T, 0, 0}}},
      {Operator::And, 0, 0, F, F, {{F, 0, 0}}},
      {Operator::And, 0, 0, F, T, {{F, 0, 0}}},
      {Operator::And, 0, 0, T, F, {{F, 0, 0}}},
      {Operator::And, 0, 0, T, T, {{T, 0, 0}}},
      {Operator::Implies, 0, 0, F, F, {{T, 0, 0}}},
      {Operator::Implies, 0, 0, F, T, {{T, 0, 0}}},
      {Operator::Implies, 0, 0, T, F, {{F, 0, 0}}},
      {Operator::Implies, 0, 0, T, T, {{T, 0, 0}}},
      {Operator::Next, 0, 0, F, {}, {{F, 1, 1}}},
      {Operator::Next, 0, 0, T, {}, {{T, 1, 1}}},
      {Operator::Box, a, b, F, {}, {{F, a, b}}},
      {Operator::Box, a, b, T, {}, {{T, b, b}}},
      {Operator::Diamond, a, b, F, {}, {{F, b, b}}},
      {Operator::Diamond, a, b, T, {}, {{T, a, b}}},
      {Operator::Until, a, b, F, F, {{F, 0, a - 1}, {F, a, b - 1}, {F, b, b}}},
      {Operator::Until, a, b, F, T, {{F, 0, a - 1}, {T, a, b}}},
      {Operator::Until, a, b, T, F, {{F, b, b}}},
      {Operator::Until, a, b, T, T, {{T, a, b}}},
      {Operator::Until, 0, b, F, F, {{F, 0, b - 1}, {F, b, b}}},
      {Operator::Until, 0, b, F, T, {{T, 0, b}}},
      {Operator::Until, 0, b, T, F, {{F, b, b}}},
      {Operator::Until, 0, b, T, T, {{T, 0, b}}},
  };
  for (const auto& r : rows) {
    const auto em = em_build(r.op, r.t1, r.t2, latency_l(r.op, r.t2));
    std::vector<Write> got;
    for (const auto& p : em_postings(em, r.a0, r.a1)) {
      got.emplace_back(p.value, p.interval.lo, p.interval.hi);
    }
    std::sort(got.begin(), got.end());
    auto want = r.expected;
    std::sort(want.begin(), want.end());
    o.expect(got == want, std::string("row ") + operator_name(r.op) +
                              " a0=" + std::to_string(r.a0) +
                              " a1=" + std::to_string(r.a1.value_or(false)));
  }
  return o;
}

Outcome balancing_example() {
  Outcome o;
  MonitorTree tree = insert_balancing_wires(parse(kTwoDiamonds));
  compute_heads(tree);
  std::vector<std::uint32_t> heads;
  for (const auto& n : tree.nodes) heads.push_back(n.head);
  o.expect(heads == std::vector<std::uint32_t>{1, 3, 5, 1}, "heads");

  // AP1 is high at times 0 and 1 only, so the left diamond fails at time 0
  // and holds at time 1 while the right one fails throughout.
  Trace t(3);
  for (int i = 0; i < 12; ++i) t.push_back({false, i < 2, false});
  o.expect(check_formula(parse(kTwoDiamonds), FabricConfig{}, t).ok(), "balanced run");
  const HeadOverride force[] = {{2, 2}};
  const RunReport r = check_formula(parse(kTwoDiamonds), FabricConfig{}, t, force);
  o.expect(!r.ok(), "forced head still matches");
  if (!r.ok()) {
    const Mismatch& m = r.mismatches.front();
    const bool left_next = oracle_verdicts(parse("F[0,1] !ap1"), t).values[1];
    const bool right_now = oracle_verdicts(parse("F[1,4] ap2"), t).values[0];
    o.expect(m.time == 0, "first mismatch time " + std::to_string(m.time));
    o.expect(m.expected == F, "expected value");
    o.expect(m.actual == (left_next || right_now), "misaligned operands");
  }
  return o;
}

Outcome program_table() {
  Outcome o;
  const FabricConfig cfg{8, 8, 4, 16};
  const MonitorProgram p = compile(parse(kTwoDiamonds), cfg).program;
  using S = OperandSource;
  const std::vector<PeConfig> pes = {
      {true, S::Ap, S::Ap, Opcode::Not, 0, {0, 0}, {0, 0}},
      {true, S::Ap, S::Ap, Opcode::Wire, 1, {1, 4}, {4, 4}},
      {true, S::Que, S::Ap, Opcode::Wire, 2, {0, 1}, {1, 1}},
      {true, S::Que, S::Que, Opcode::Or, 3, {0, 0}, {0, 0}},
  };
  const std::vector<QConfig> qs = {
      {true, false, 2, 0, 1},
      {true, false, 3, 1, 5},
      {true, false, 3, 0, 3},
      {true, true, 0, 0, 1},
  };
  for (std::size_t i = 0; i < 8; ++i) {
    o.expect(p.pes[i] == (i < pes.size() ? pes[i] : PeConfig{}),
             "PE" + std::to_string(i));
    o.expect(p.qs[i] == (i < qs.size() ? qs[i] : QConfig{}),
             "Q" + std::to_string(i));
  }
  o.expect(p.ap2pe[0][0] == 1 && p.ap2pe[1][0] == 2, "AP routes");
  return o;
}

std::uint64_t log2up(std::uint64_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

Outcome bit_widths() {
  Outcome o;
  for (std::uint32_t n : {2u, 4u, 8u, 16u}) {
    for (std::uint32_t sz : {4u, 16u, 64u, 256u}) {
      const FabricConfig cfg{n, n, 16, sz};
      const std::uint64_t pe = n * (6 + log2up(n) + 4 * log2up(sz));
      const std::uint64_t q = n * (3 + log2up(n) + log2up(sz));
      const std::uint64_t ap = n * 2 * log2up(16);
      const BitCounts c = bit_counts(cfg);
      const std::string at = " for " + to_string(cfg);
      o.expect(c.pe_bits == pe, "PE bits" + at);
      o.expect(c.q_bits == q, "Q bits" + at);
      o.expect(c.route_bits == ap, "AP2PE bits" + at);
      const auto body = encode_bitstream(MonitorProgram::inactive(cfg), cfg);
      o.expect(body.size() == (pe + q + ap + 7) / 8, "encoded bytes" + at);
    }
  }
  return o;
}

FuzzSummary fuzz_run;

Outcome oracle_equivalence() {
  Outcome o;
  FuzzOptions opts;
  opts.seed = 1;
  opts.count = 1000;
  opts.max_depth = 4;
  opts.max_t2 = 8;
  opts.trace_length = 64;
  fuzz_run = fuzz(opts);
  const FuzzSummary& s = fuzz_run;
  o.expect(s.formulas == 2000, "formula count " + std::to_string(s.formulas));
  o.expect(s.mismatches == 0, "mismatches " + std::to_string(s.mismatches));
  o.expect(s.failed == 0, "failed " + std::to_string(s.failed));
  o.expect(s.write_conflicts == 0, "write conflicts");
  o.expect(s.maybe_faults == 0, "Maybe deletions");
  o.expect(s.other_errors == 0, "errors");
  o.expect(s.reprogram_divergences == 0, "reprogram divergences");
  return o;
}

Outcome throughput() {
  Outcome o;
  o.expect(fuzz_run.formulas == 2000, "fuzz run missing");
  o.expect(fuzz_run.throughput_violations == 0,
           "violations " + std::to_string(fuzz_run.throughput_violations));
  return o;
}

Outcome reprogramming() {
  Outcome o;
  const FabricConfig cfg{};
  std::mt19937_64 rng(2024);
  const Trace first = random_trace(rng, cfg.n_ap, 50);
  const Trace second = random_trace(rng, cfg.n_ap, 50);
  const Formula a = parse("ap0 -> X ap1");
  const Formula b = parse("ap0 | F[1,3] ap1");
  const auto body_a = encode_bitstream(compile(a, cfg).program, cfg);
  const auto body_b = encode_bitstream(compile(b, cfg).program, cfg);

  Fabric f(cfg);
  f.load_program(body_a);
  RunReport ra;
  ra.reported_latency = f.latency();
  run_trace(f, first, ra);
  o.expect(compare(oracle_verdicts(a, first), ra.verdicts, 50, f.latency())
               .empty(),
           "first phase verdicts");
  o.expect(ra.steady_throughput(), "first phase throughput");

  f.load_program(body_b);
  Fabric fresh(cfg);
  fresh.load_program(body_b);
  o.expect(f.same_state(fresh), "state right after reprogram");
  RunReport rb;
  RunReport rf;
  rb.reported_latency = f.latency();
  run_trace(f, second, rb);
  run_trace(fresh, second, rf);
  o.expect(compare(oracle_verdicts(b, second), rb.verdicts, 50, f.latency())
               .empty(),
           "second phase verdicts");
  o.expect(rb.steady_throughput(), "second phase throughput");
  o.expect(rb.verdicts == rf.verdicts, "verdicts differ from a fresh fabric");
  o.expect(f.same_state(fresh), "state differs from a fresh fabric");
  return o;
}

}  // namespace

int main() {
  report(1, 1, negation_golden);
  report(2, 1, until_golden);
  report(3, 1000, reasoning_table);
  report(4, 1000, balancing_example);
  report(5, 1000, program_table);
  report(6, 1000, bit_widths);
  report(7, 60000, oracle_equivalence);
  report(8, 1000, reprogramming);
  report(9, 1000, throughput);
  std::printf("%s\n", failures == 0 ? "all criteria passed"
                                    : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
