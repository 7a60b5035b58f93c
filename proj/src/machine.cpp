// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/machine.hpp"

#include <stdexcept>
#include <string>

#include "mtlmon/errors.hpp"

namespace mtlmon {

const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Wire: return "wire";
    case Opcode::Not: return "not";
    case Opcode::Or: return "or";
    case Opcode::And: return "and";
    case Opcode::Implies: return "implies";
  }
  return "?";
}

bool is_unary(Opcode op) { return op == Opcode::Wire || op == Opcode::Not; }

bool am_result(Opcode opcode, bool op0, std::optional<bool> op1) {
  if (is_unary(opcode) == op1.has_value()) {
    throw ArityError(std::string("opcode '") + opcode_name(opcode) +
                     "' given the wrong number of operands");
  }
  switch (opcode) {
    case Opcode::Wire: return op0;
    case Opcode::Not: return !op0;
    case Opcode::Or: return op0 || *op1;
    case Opcode::And: return op0 && *op1;
    case Opcode::Implies: return !op0 || *op1;
  }
  return false;
}

namespace {

AmProgram am(Opcode opcode, EmOperand op0, std::optional<EmOperand> op1,
             Interval i_top, Interval i_bot, bool mod_top, bool mod_bot) {
  AmProgram p;
  p.opcode = opcode;
  p.op0 = op0;
  p.op1 = op1;
  p.i_top = i_top;
  p.i_bot = i_bot;
  p.mod_top = mod_top;
  p.mod_bot = mod_bot;
  return p;
}

constexpr auto A0 = EmOperand::Alpha0;
constexpr auto A1 = EmOperand::Alpha1;

Interval at(std::int64_t i) { return Interval::span(i, i); }

}  // namespace

EvaluatorMachine em_build(Operator op, std::uint32_t t1, std::uint32_t t2,
                          std::uint32_t head) {
  const bool temporal =
      op == Operator::Until || op == Operator::Box || op == Operator::Diamond;
  if (!temporal) t1 = t2 = 0;
  if (t1 > t2) {
    throw std::invalid_argument("interval lower bound exceeds upper bound");
  }
  EvaluatorMachine em;
  em.op = op;
  em.t1 = t1;
  em.t2 = t2;
  em.min_head = latency_l(op, t2);
  em.head = head;
  if (head < em.min_head) {
    throw std::invalid_argument(std::string("head ") + std::to_string(head) +
                                " below minimum " +
                                std::to_string(em.min_head) + " for " +
                                operator_name(op));
  }

  const std::int64_t lo = t1;
  const std::int64_t hi = t2;
  switch (op) {
    case Operator::Not:
      em.ams = {am(Opcode::Not, A0, {}, at(0), at(0), true, true)};
      break;
    case Operator::Or:
      em.ams = {am(Opcode::Or, A0, A1, at(0), at(0), true, true)};
      break;
    case Operator::And:
      em.ams = {am(Opcode::And, A0, A1, at(0), at(0), true, true)};
      break;
    case Operator::Implies:
      em.ams = {am(Opcode::Implies, A0, A1, at(0), at(0), true, true)};
      break;
    case Operator::Wire:
      em.ams = {am(Opcode::Wire, A0, {}, at(0), at(0), true, true)};
      break;
    case Operator::Next:
      em.ams = {am(Opcode::Wire, A0, {}, at(1), at(1), true, true)};
      break;
    case Operator::Box:
      em.ams = {am(Opcode::Wire, A0, {}, at(hi), Interval::span(lo, hi), true,
                   true)};
      break;
    case Operator::Diamond:
      em.ams = {am(Opcode::Wire, A0, {}, Interval::span(lo, hi), at(hi), true,
                   true)};
      break;
    case Operator::Until:
      if (t1 == 0) {
        em.ams = {
            am(Opcode::Or, A0, A1, at(0), Interval::span(0, hi - 1), false,
               true),
            am(Opcode::Wire, A1, {}, Interval::span(0, hi), at(hi), true,
               true),
        };
      } else {
        em.ams = {
            am(Opcode::Wire, A0, {}, at(0), Interval::span(0, lo - 1), false,
               true),
            am(Opcode::Wire, A1, {}, Interval::span(lo, hi), at(hi), true,
               true),
            am(Opcode::Or, A0, A1, at(0), Interval::span(lo, hi - 1), false,
               true),
        };
      }
      break;
  }
  for (auto& a : em.ams) a.head = head;
  return em;
}

std::vector<Posting> em_postings(const EvaluatorMachine& em, bool alpha0,
                                 std::optional<bool> alpha1) {
  if ((em.arity() == 2) != alpha1.has_value()) {
    throw ArityError(std::string("evaluator for ") + operator_name(em.op) +
                     " given the wrong number of operands");
  }
  auto operand = [&](EmOperand which) {
    return which == EmOperand::Alpha0 ? alpha0 : *alpha1;
  };
  std::vector<Posting> out;
  for (std::size_t k = 0; k < em.ams.size(); ++k) {
    const auto& a = em.ams[k];
    std::optional<bool> op1;
    if (a.op1) op1 = operand(*a.op1);
    const bool res = am_result(a.opcode, operand(a.op0), op1);
    const bool fires = res ? a.mod_top : a.mod_bot;
    const Interval iv = res ? a.i_top : a.i_bot;
    if (fires && !iv.empty()) out.push_back({k, iv, res});
  }
  return out;
}

EmStep em_step(const EvaluatorMachine& em, const QueState& q, bool alpha0,
               std::optional<bool> alpha1) {
  EmStep step{q, q, q, {}, std::nullopt};
  step.postings = em_postings(em, alpha0, alpha1);
  step.after_add.add();

  // Cells each firing AM would resolve; these must not overlap.
  const QueState& base = step.after_add;
  std::vector<std::vector<bool>> touched;
  for (const auto& p : step.postings) {
    std::vector<bool> cells(base.occupancy(), false);
    for (std::size_t k = p.interval.lo;
         k <= p.interval.hi && k < base.occupancy(); ++k) {
      cells[k] = base[k] == Cell::Maybe;
    }
    for (const auto& other : touched) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k] && other[k]) {
          throw WriteConflictFault("two AMs of one " +
                                   std::string(operator_name(em.op)) +
                                   " evaluator modify cell " +
                                   std::to_string(k) + " in the same step");
        }
      }
    }
    touched.push_back(std::move(cells));
  }

  step.after_modify = step.after_add;
  for (const auto& p : step.postings) {
    step.after_modify.modify(p.interval, p.value ? ModifyMode::TopIfMaybe
                                                 : ModifyMode::BotIfMaybe);
  }
  step.after_del = step.after_modify;
  step.verdict = step.after_del.del(em.head);
  return step;
}

VerdictStream em_run(const EvaluatorMachine& em,
                     const std::vector<bool>& alpha0,
                     const std::vector<bool>& alpha1) {
  const bool binary = em.arity() == 2;
  if (binary && alpha1.size() != alpha0.size()) {
    throw ArityError("operand streams differ in length");
  }
  if (!binary && !alpha1.empty()) {
    throw ArityError("unary evaluator given a second operand stream");
  }
  QueState q(em.head + 1);
  VerdictStream out;
  for (std::size_t i = 0; i < alpha0.size(); ++i) {
    std::optional<bool> a1;
    if (binary) a1 = alpha1[i];
    EmStep s = em_step(em, q, alpha0[i], a1);
    if (s.verdict) out.values.push_back(*s.verdict);
    q = std::move(s.after_del);
  }
  return out;
}

}  // namespace mtlmon
