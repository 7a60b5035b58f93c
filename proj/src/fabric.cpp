// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/fabric.hpp"

#include <algorithm>

#include "mtlmon/bitstream.hpp"
#include "mtlmon/errors.hpp"

namespace mtlmon {

namespace {

std::optional<Interval> merge(std::vector<Interval> ivs, const char* pol) {
  if (ivs.empty()) return std::nullopt;
  std::sort(ivs.begin(), ivs.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  Interval u = ivs.front();
  for (std::size_t i = 1; i < ivs.size(); ++i) {
    if (ivs[i].lo <= u.hi) {
      throw WriteConflictFault(std::string(pol) + " postings " +
                               to_string(u) + " and " + to_string(ivs[i]) +
                               " overlap");
    }
    if (ivs[i].lo != u.hi + 1) {
      throw WriteConflictFault(std::string(pol) + " postings leave a gap " +
                               "between " + to_string(u) + " and " +
                               to_string(ivs[i]));
    }
    u.hi = ivs[i].hi;
  }
  return u;
}

}  // namespace

QueWriteBundle coalesce(std::span<const PePosting> postings) {
  std::vector<Interval> top;
  std::vector<Interval> bot;
  for (const auto& p : postings) {
    if (p.interval.empty()) continue;
    (p.value ? top : bot).push_back(p.interval);
  }
  QueWriteBundle b{merge(std::move(top), "T"), merge(std::move(bot), "F")};
  if (b.top && b.bot && b.top->lo <= b.bot->hi && b.bot->lo <= b.top->hi) {
    throw WriteConflictFault("T interval " + to_string(*b.top) +
                             " overlaps F interval " + to_string(*b.bot));
  }
  return b;
}

Fabric::Fabric(const FabricConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  program_bytes_ = bit_counts(cfg_).bytes();
  program_ = MonitorProgram::inactive(cfg_);
  operands_.assign(cfg_.n_pe, {});
  clear_datapath();
}

void Fabric::clear_datapath() {
  ques_.assign(cfg_.n_q, std::vector<Slot>(cfg_.q_sz, Slot::Empty));
  latch_.assign(cfg_.n_q, std::nullopt);
  bundles_.assign(cfg_.n_q, QueWriteBundle{});
}

void Fabric::begin_reprogram() {
  mode_ = FabricMode::Programming;
  shift_.clear();
}

void Fabric::load_program_byte(std::uint8_t byte) {
  if (mode_ != FabricMode::Programming) {
    throw ProtocolError("program byte received while running");
  }
  ++cycle_;
  shift_.push_back(byte);
  if (shift_.size() == program_bytes_) latch_program();
}

void Fabric::latch_program() {
  std::vector<std::uint8_t> bytes;
  bytes.swap(shift_);
  MonitorProgram prog = decode_bitstream(bytes, cfg_);
  auto operands = resolve_operands(prog, cfg_);
  prog.reported_latency = derive_latency(prog, cfg_);
  program_ = std::move(prog);
  operands_ = std::move(operands);
  clear_datapath();
  running_cycle_ = 0;
  mode_ = FabricMode::Running;
}

void Fabric::load_program(std::span<const std::uint8_t> body) {
  begin_reprogram();
  if (body.size() != program_bytes_) {
    throw BitstreamError("program is " + std::to_string(body.size()) +
                         " bytes, fabric expects " +
                         std::to_string(program_bytes_));
  }
  for (auto b : body) load_program_byte(b);
}

void Fabric::que_add(std::uint32_t q) {
  auto& cells = ques_[q];
  if (cells.back() != Slot::Empty) {
    throw CapacityFault("Q" + std::to_string(q) + " add with all " +
                        std::to_string(cfg_.q_sz) + " cells occupied");
  }
  std::move_backward(cells.begin(), cells.end() - 1, cells.end());
  cells.front() = Slot::Maybe;
  const std::uint32_t head = program_.qs[q].head;
  if (head + 1 < cells.size() && cells[head + 1] != Slot::Empty) {
    throw CapacityFault("Q" + std::to_string(q) +
                        " occupancy exceeds head + 1");
  }
}

void Fabric::que_modify(std::uint32_t q, Interval iv, Slot to) {
  auto& cells = ques_[q];
  for (std::size_t k = iv.lo; k <= iv.hi && k < cells.size(); ++k) {
    if (cells[k] == Slot::Maybe) cells[k] = to;
  }
}

std::optional<bool> Fabric::que_del(std::uint32_t q) {
  auto& cells = ques_[q];
  const std::uint32_t head = program_.qs[q].head;
  const Slot s = cells[head];
  if (s == Slot::Empty) return std::nullopt;
  if (s == Slot::Maybe) {
    throw StabilityFault("Q" + std::to_string(q) +
                         " deleted an unresolved Maybe at head " +
                         std::to_string(head));
  }
  std::move(cells.begin() + head + 1, cells.end(), cells.begin() + head);
  cells.back() = Slot::Empty;
  return s == Slot::Top;
}

std::optional<Verdict> Fabric::step(const std::vector<bool>& ap_values) {
  if (mode_ != FabricMode::Running) {
    throw ProtocolError("step while the fabric is being programmed");
  }
  if (ap_values.size() != cfg_.n_ap) {
    throw TraceError("event has " + std::to_string(ap_values.size()) +
                     " AP values, fabric has " + std::to_string(cfg_.n_ap));
  }

  // PE phase.
  std::vector<std::vector<PePosting>> posted(cfg_.n_q);
  std::vector<bool> written(cfg_.n_q, false);
  for (std::uint32_t pe = 0; pe < cfg_.n_pe; ++pe) {
    const PeConfig& pc = program_.pes[pe];
    if (!pc.active) continue;
    std::vector<std::optional<bool>> in;
    for (const auto& o : operands_[pe]) {
      in.push_back(o.source == OperandSource::Ap
                       ? std::optional<bool>(ap_values[o.index])
                       : latch_[o.index]);
    }
    if (std::any_of(in.begin(), in.end(), [](auto v) { return !v; })) {
      continue;
    }
    std::optional<bool> op1;
    if (in.size() == 2) op1 = *in[1];
    const bool res = am_result(pc.opcode, *in[0], op1);
    written[pc.r_qid] = true;
    posted[pc.r_qid].push_back({res ? pc.i_top : pc.i_bot, res});
  }

  // PE2Q and Que phases.
  std::optional<Verdict> verdict;
  for (std::uint32_t q = 0; q < cfg_.n_q; ++q) {
    bundles_[q] = {};
    const QConfig& qc = program_.qs[q];
    if (!qc.active || !written[q]) {
      latch_[q] = std::nullopt;
      continue;
    }
    bundles_[q] = coalesce(posted[q]);
    que_add(q);
    if (bundles_[q].top) que_modify(q, *bundles_[q].top, Slot::Top);
    if (bundles_[q].bot) que_modify(q, *bundles_[q].bot, Slot::Bot);
    const auto out = que_del(q);
    if (qc.is_verdict) {
      latch_[q] = std::nullopt;
      if (out) {
        verdict = Verdict{running_cycle_ - program_.reported_latency, *out};
      }
    } else {
      latch_[q] = out;
    }
  }
  ++cycle_;
  ++running_cycle_;
  return verdict;
}

QueState Fabric::que_state(std::uint32_t q) const {
  std::vector<Cell> cells;
  for (Slot s : ques_.at(q)) {
    if (s == Slot::Empty) break;
    cells.push_back(s == Slot::Top ? Cell::Top
                    : s == Slot::Bot ? Cell::Bot
                                     : Cell::Maybe);
  }
  return QueState(std::max<std::size_t>(program_.qs[q].head + 1, cells.size()),
                  std::move(cells));
}

bool Fabric::same_state(const Fabric& other) const {
  return cfg_ == other.cfg_ && mode_ == other.mode_ &&
         running_cycle_ == other.running_cycle_ && shift_ == other.shift_ &&
         program_ == other.program_ && ques_ == other.ques_ &&
         latch_ == other.latch_ && bundles_ == other.bundles_;
}

}  // namespace mtlmon
