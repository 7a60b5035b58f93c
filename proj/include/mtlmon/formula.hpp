// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtlmon {

enum class Kind : std::uint8_t {
  True,
  Ap,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Box,
  Diamond,
};

/// Bounded discrete-time MTL formula. Immutable; copies share structure.
class Formula {
 public:
  static Formula make_true();
  static Formula make_ap(std::uint32_t index);
  static Formula make_not(Formula f);
  static Formula make_and(Formula lhs, Formula rhs);
  static Formula make_or(Formula lhs, Formula rhs);
  static Formula make_implies(Formula lhs, Formula rhs);
  static Formula make_next(Formula f);
  // Temporal constructors throw std::invalid_argument when lo > hi.
  static Formula make_until(Formula lhs, Formula rhs, std::uint32_t lo,
                            std::uint32_t hi);
  static Formula make_box(Formula f, std::uint32_t lo, std::uint32_t hi);
  static Formula make_diamond(Formula f, std::uint32_t lo, std::uint32_t hi);

  Kind kind() const;
  std::uint32_t ap_index() const;
  // Interval bounds of Until/Box/Diamond; zero otherwise.
  std::uint32_t lo() const;
  std::uint32_t hi() const;
  std::size_t arity() const;
  const Formula& child(std::size_t i) const;

  bool is_temporal() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Parses the ASCII grammar:
///
///   implies := or ( '->' implies )?
///   or      := and ( '|' and )*
///   and     := until ( '&' until )*
///   until   := unary ( 'U' '[' n ',' n ']' until )?
///   unary   := '!' unary | 'X' unary | ('G'|'F') '[' n ',' n ']' unary
///            | 'true' | 'ap' n | '(' implies ')'
///
/// Throws SyntaxError or IntervalError.
Formula parse(std::string_view text);

/// Fully parenthesised rendering that parse() maps back to the same tree.
std::string to_string(const Formula& f);

/// Operators as seen by the monitor. Wire is the identity operator the
/// compiler inserts to delay a raw AP; it never appears in parsed text.
enum class Operator : std::uint8_t {
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Box,
  Diamond,
  Wire,
};

std::optional<Operator> operator_of(Kind k);
const char* operator_name(Operator op);
bool is_binary(Operator op);

/// Minimum stable queue depth: 1 for Boolean ops and wire, 2 for Next,
/// t2 + 1 for Until/Box/Diamond.
std::uint32_t latency_l(Operator op, std::uint32_t t2);

/// Monitor horizon H: charges pipeline latency per operator.
std::uint64_t horizon(const Formula& f);

/// Number of future events needed to fix the verdict at a time step.
std::uint64_t semantic_future(const Formula& f);

std::optional<std::uint32_t> max_ap_index(const Formula& f);
std::size_t operator_count(const Formula& f);
std::size_t depth(const Formula& f);

struct FoldResult {
  std::optional<Formula> formula;  // unset iff the formula is constant
  bool constant_value = false;

  bool is_constant() const { return !formula.has_value(); }
};

/// Removes every True node. Exact on all traces, including bounded
/// intervals (e.g. `a U[t1,t2] true` becomes `G[0,t1-1] a`).
FoldResult constant_fold(const Formula& f);

}  // namespace mtlmon
