// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mtlmon/formula.hpp"
#include "mtlmon/que.hpp"
#include "mtlmon/trace.hpp"

namespace mtlmon {

/// Abstract Machine opcodes. Numeric values are the 3-bit hardware codes.
enum class Opcode : std::uint8_t {
  Wire = 0,
  Not = 1,
  Or = 2,
  And = 3,
  Implies = 4,
};

const char* opcode_name(Opcode op);
bool is_unary(Opcode op);

/// Throws ArityError when op1 presence does not match the opcode.
bool am_result(Opcode opcode, bool op0, std::optional<bool> op1);

/// Which operand stream of the enclosing Evaluator Machine feeds an AM input.
enum class EmOperand : std::uint8_t { Alpha0, Alpha1 };

struct AmProgram {
  Opcode opcode = Opcode::Wire;
  EmOperand op0 = EmOperand::Alpha0;
  std::optional<EmOperand> op1;
  std::uint32_t target_que = 0;
  std::uint32_t head = 0;
  Interval i_top;
  Interval i_bot;
  bool mod_top = true;
  bool mod_bot = true;

  bool operator==(const AmProgram&) const = default;
};

/// One MTL operator realised as 1-3 AMs sharing a single Que.
struct EvaluatorMachine {
  Operator op = Operator::Wire;
  std::uint32_t t1 = 0;
  std::uint32_t t2 = 0;
  std::uint32_t head = 0;
  std::uint32_t min_head = 0;
  std::vector<AmProgram> ams;

  std::size_t arity() const { return is_binary(op) ? 2 : 1; }
};

/// Builds the AM list for `op`. Until uses the two-AM form when t1 == 0.
/// Throws std::invalid_argument if head < latency_l(op, t2) or t1 > t2.
EvaluatorMachine em_build(Operator op, std::uint32_t t1, std::uint32_t t2,
                          std::uint32_t head);

/// A queue write requested by one AM in one step.
struct Posting {
  std::size_t am;
  Interval interval;
  bool value;

  bool operator==(const Posting&) const = default;
};

/// The (value, positions) writes the machine requests for one operand pair.
/// AMs whose Mod flag is off for their result, or whose interval is empty,
/// contribute nothing.
std::vector<Posting> em_postings(const EvaluatorMachine& em, bool alpha0,
                                 std::optional<bool> alpha1);

struct EmStep {
  QueState after_add;
  QueState after_modify;
  QueState after_del;
  std::vector<Posting> postings;
  std::optional<bool> verdict;
};

/// One time step: a single add, every firing modify in AM order, a single
/// del at the machine's head. Throws WriteConflictFault if two AMs would
/// resolve the same cell in the same step.
EmStep em_step(const EvaluatorMachine& em, const QueState& q, bool alpha0,
               std::optional<bool> alpha1);

/// Folds em_step over the operand streams. `alpha1` must be empty for
/// unary machines and of equal length otherwise. The i-th emitted value is
/// the verdict for time i.
VerdictStream em_run(const EvaluatorMachine& em, const std::vector<bool>& alpha0,
                     const std::vector<bool>& alpha1 = {});

}  // namespace mtlmon
