// SPDX-License-Identifier: Apache-2.0
// mtlmon: compile MTL formulae for the monitor fabric, run traces through
// it, check it against the reference evaluator, and fuzz the pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "mtlmon/bitstream.hpp"
#include "mtlmon/compiler.hpp"
#include "mtlmon/driver.hpp"
#include "mtlmon/errors.hpp"
#include "mtlmon/fabric.hpp"
#include "mtlmon/formula.hpp"
#include "mtlmon/trace.hpp"

namespace {

using namespace mtlmon;

enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kParse = 3,
  kAllocation = 4,
  kIo = 5,
  kMismatch = 6,
  kFault = 7,
};

void add_config_options(CLI::App* cmd, FabricConfig& cfg) {
  cmd->add_option("--npe", cfg.n_pe, "Processing Elements")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--nq", cfg.n_q, "Ques")->check(CLI::PositiveNumber);
  cmd->add_option("--nap", cfg.n_ap, "atomic proposition inputs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--qsz", cfg.q_sz, "cells per Que")
      ->check(CLI::PositiveNumber);
}

std::vector<HeadOverride> parse_overrides(const std::vector<std::string>& v) {
  std::vector<HeadOverride> out;
  for (const auto& s : v) {
    const auto eq = s.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument(s);
      std::size_t used = 0;
      const auto em = std::stoul(s.substr(0, eq), &used);
      if (used != eq) throw std::invalid_argument(s);
      const auto rest = s.substr(eq + 1);
      const auto head = std::stoul(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(s);
      out.push_back({static_cast<std::uint32_t>(em),
                     static_cast<std::uint32_t>(head)});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("--force-head expects <em>=<head>, got '" +
                                  s + "'");
    }
  }
  return out;
}

int cmd_compile(const std::string& text, const FabricConfig& cfg,
                const std::string& path) {
  const Formula f = parse(text);
  const FoldResult folded = constant_fold(f);
  if (folded.is_constant()) {
    std::cout << "constant formula: verdict always "
              << (folded.constant_value ? 1 : 0) << "\n";
    return kOk;
  }
  const Compilation c = compile(*folded.formula, cfg);
  const auto body = encode_bitstream(c.program, cfg);
  write_bitstream_file(path, cfg, body);

  std::size_t pes = 0;
  std::size_t qs = 0;
  for (const auto& p : c.program.pes) pes += p.active;
  for (const auto& q : c.program.qs) qs += q.active;
  const BitCounts bits = bit_counts(cfg);
  std::cout << "formula: " << to_string(*folded.formula) << "\n"
            << "config: " << to_string(cfg) << "\n"
            << "latency: " << c.program.reported_latency << "\n"
            << "PEs used: " << pes << "/" << cfg.n_pe << "\n"
            << "Ques used: " << qs << "/" << cfg.n_q << "\n"
            << "bits: PE=" << bits.pe_bits << " Q=" << bits.q_bits
            << " AP2PE=" << bits.route_bits << " total=" << bits.total()
            << " (" << bits.bytes() << " bytes, " << bits.bytes()
            << " programming cycles)\n"
            << "wrote " << path << "\n";
  return kOk;
}

int cmd_run(const std::string& prog_path, const std::string& trace_path) {
  const BitstreamFile file = read_bitstream_file(prog_path);
  const Trace trace = read_trace_file(trace_path);
  Fabric fabric(file.cfg);
  fabric.load_program(file.body);
  RunReport report;
  report.cfg = file.cfg;
  report.reported_latency = fabric.latency();
  report.programming_cycles = fabric.cycle();
  run_trace(fabric, trace, report);
  write_verdicts(std::cout, report.verdicts);
  std::cerr << "latency=" << report.reported_latency
            << " programming_cycles=" << report.programming_cycles
            << " run_cycles=" << report.run_cycles
            << " verdicts=" << report.verdicts.size() << "\n";
  return kOk;
}

int cmd_check(const std::string& text, const FabricConfig& cfg,
              const std::string& trace_path,
              const std::vector<std::string>& force) {
  const auto overrides = parse_overrides(force);
  const Formula f = parse(text);
  const Trace trace = read_trace_file(trace_path);
  const RunReport r = check_formula(f, cfg, trace, overrides);

  std::cout << "formula: " << r.formula << "\n";
  if (r.constant) {
    std::cout << "constant formula: verdict always " << (*r.constant ? 1 : 0)
              << "\n";
  } else {
    std::cout << "latency: " << r.reported_latency << "\n"
              << "programming cycles: " << r.programming_cycles << "\n"
              << "run cycles: " << r.run_cycles << "\n";
  }
  std::cout << "verdicts: " << r.verdicts.size() << "\n";
  auto show = [](const std::optional<bool>& v) {
    return v ? std::string(*v ? "1" : "0") : std::string("none");
  };
  if (r.ok()) {
    std::cout << "result: match\n";
    return kOk;
  }
  std::cout << "result: " << r.mismatches.size() << " mismatches\n";
  const auto& first = r.mismatches.front();
  std::cout << "first mismatch at time " << first.time << ": expected "
            << show(first.expected) << ", fabric " << show(first.actual)
            << "\n";
  for (std::size_t i = 1; i < r.mismatches.size() && i < 10; ++i) {
    const auto& m = r.mismatches[i];
    std::cout << "mismatch at time " << m.time << ": expected "
              << show(m.expected) << ", fabric " << show(m.actual) << "\n";
  }
  return kMismatch;
}

int cmd_fuzz(const FuzzOptions& opts) {
  const FuzzSummary s = fuzz(opts);
  std::cout << s.to_string() << "\n";
  for (const auto& f : s.failures) std::cout << "  " << f << "\n";
  if (s.ok()) return kOk;
  if (s.write_conflicts || s.maybe_faults) return kFault;
  return kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MTL runtime-verification monitor toolchain"};
  app.require_subcommand(1);

  std::string formula;
  std::string out_path;
  std::string prog_path;
  std::string trace_path;
  std::vector<std::string> force;
  FabricConfig compile_cfg;
  FabricConfig check_cfg;
  FuzzOptions fuzz_opts;

  auto* compile_cmd = app.add_subcommand("compile", "compile a formula");
  compile_cmd->add_option("--formula", formula, "MTL formula")->required();
  compile_cmd->add_option("-o,--output", out_path, "bitstream file")
      ->required();
  add_config_options(compile_cmd, compile_cfg);

  auto* run_cmd = app.add_subcommand("run", "run a trace through a program");
  run_cmd->add_option("--prog", prog_path, "bitstream file")->required();
  run_cmd->add_option("--trace", trace_path, "trace file")->required();

  auto* check_cmd =
      app.add_subcommand("check", "compare the fabric with the oracle");
  check_cmd->add_option("--formula", formula, "MTL formula")->required();
  check_cmd->add_option("--trace", trace_path, "trace file")->required();
  check_cmd->add_option("--force-head", force,
                        "debug: force EM <em> (1-based, breadth-first) to "
                        "head <n>, as <em>=<n>");
  add_config_options(check_cmd, check_cfg);

  auto* fuzz_cmd = app.add_subcommand("fuzz", "random differential testing");
  fuzz_cmd->add_option("--seed", fuzz_opts.seed, "RNG seed");
  fuzz_cmd->add_option("--count", fuzz_opts.count, "iterations")
      ->check(CLI::NonNegativeNumber);
  fuzz_cmd->add_option("--max-depth", fuzz_opts.max_depth, "operator depth")
      ->check(CLI::PositiveNumber);
  fuzz_cmd->add_option("--max-t2", fuzz_opts.max_t2, "largest interval bound")
      ->check(CLI::PositiveNumber);
  fuzz_cmd->add_option("--trace-length", fuzz_opts.trace_length,
                       "events per trace");
  add_config_options(fuzz_cmd, fuzz_opts.cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compile_cmd) return cmd_compile(formula, compile_cfg, out_path);
    if (*run_cmd) return cmd_run(prog_path, trace_path);
    if (*check_cmd) return cmd_check(formula, check_cfg, trace_path, force);
    if (*fuzz_cmd) return cmd_fuzz(fuzz_opts);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const AllocationError& e) {
    std::cerr << "allocation error: " << e.what() << "\n";
    return kAllocation;
  } catch (const Fault& e) {
    std::cerr << "fabric fault: " << e.what() << "\n";
    return kFault;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
