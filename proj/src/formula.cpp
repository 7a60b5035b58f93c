// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/formula.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <stdexcept>

#include "mtlmon/errors.hpp"

namespace mtlmon {

struct Formula::Node {
  Kind kind;
  std::uint32_t ap = 0;
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  std::vector<Formula> children;
};

Formula::Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

namespace {

void check_bounds(std::uint32_t lo, std::uint32_t hi) {
  if (lo > hi) {
    throw std::invalid_argument("interval lower bound exceeds upper bound");
  }
}

}  // namespace

Formula Formula::make_true() {
  return Formula(std::make_shared<const Node>(Node{Kind::True, 0, 0, 0, {}}));
}

Formula Formula::make_ap(std::uint32_t index) {
  return Formula(std::make_shared<const Node>(Node{Kind::Ap, index, 0, 0, {}}));
}

Formula Formula::make_not(Formula f) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Not, 0, 0, 0, {std::move(f)}}));
}

Formula Formula::make_and(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::And, 0, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::make_or(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Or, 0, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::make_implies(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Implies, 0, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::make_next(Formula f) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Next, 0, 0, 0, {std::move(f)}}));
}

Formula Formula::make_until(Formula lhs, Formula rhs, std::uint32_t lo,
                            std::uint32_t hi) {
  check_bounds(lo, hi);
  return Formula(std::make_shared<const Node>(
      Node{Kind::Until, 0, lo, hi, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::make_box(Formula f, std::uint32_t lo, std::uint32_t hi) {
  check_bounds(lo, hi);
  return Formula(
      std::make_shared<const Node>(Node{Kind::Box, 0, lo, hi, {std::move(f)}}));
}

Formula Formula::make_diamond(Formula f, std::uint32_t lo, std::uint32_t hi) {
  check_bounds(lo, hi);
  return Formula(std::make_shared<const Node>(
      Node{Kind::Diamond, 0, lo, hi, {std::move(f)}}));
}

Kind Formula::kind() const { return node_->kind; }
std::uint32_t Formula::ap_index() const { return node_->ap; }
std::uint32_t Formula::lo() const { return node_->lo; }
std::uint32_t Formula::hi() const { return node_->hi; }
std::size_t Formula::arity() const { return node_->children.size(); }
const Formula& Formula::child(std::size_t i) const {
  return node_->children.at(i);
}

bool Formula::is_temporal() const {
  return node_->kind == Kind::Until || node_->kind == Kind::Box ||
         node_->kind == Kind::Diamond;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.ap == y.ap && x.lo == y.lo && x.hi == y.hi &&
         x.children == y.children;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse_implies();
    skip_space();
    if (pos_ != text_.size()) {
      throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'",
                        pos_);
    }
    return f;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  // Peeks an identifier without consuming it.
  std::string_view peek_word() {
    skip_space();
    std::size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) ||
            text_[end] == '_')) {
      ++end;
    }
    return text_.substr(pos_, end - pos_);
  }

  std::uint32_t parse_bound() {
    skip_space();
    std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > std::numeric_limits<std::uint32_t>::max()) {
        throw IntervalError("interval bound out of range", start);
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw IntervalError("interval bound must be a natural number", start);
    }
    return static_cast<std::uint32_t>(value);
  }

  std::pair<std::uint32_t, std::uint32_t> parse_interval() {
    skip_space();
    std::size_t start = pos_;
    if (!accept("[")) {
      throw SyntaxError("expected '[' after temporal operator", pos_);
    }
    std::uint32_t lo = parse_bound();
    if (!accept(",")) {
      skip_space();
      throw IntervalError("expected ',' in interval", pos_);
    }
    std::uint32_t hi = parse_bound();
    if (!accept("]")) {
      skip_space();
      throw IntervalError("expected ']' closing interval", pos_);
    }
    if (lo > hi) {
      throw IntervalError("interval [" + std::to_string(lo) + "," +
                              std::to_string(hi) + "] has lower > upper",
                          start);
    }
    return {lo, hi};
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept("->")) {
      return Formula::make_implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (accept("|")) {
      lhs = Formula::make_or(std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (accept("&")) {
      lhs = Formula::make_and(std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (peek_word() == "U") {
      pos_ += 1;
      auto [lo, hi] = parse_interval();
      return Formula::make_until(std::move(lhs), parse_until(), lo, hi);
    }
    return lhs;
  }

  Formula parse_unary() {
    if (at_end()) {
      throw SyntaxError("unexpected end of formula", pos_);
    }
    if (accept("!")) {
      return Formula::make_not(parse_unary());
    }
    if (accept("(")) {
      Formula inner = parse_implies();
      if (!accept(")")) {
        skip_space();
        throw SyntaxError("expected ')'", pos_);
      }
      return inner;
    }
    std::size_t start = pos_;
    std::string_view word = peek_word();
    if (word.empty()) {
      throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'",
                        pos_);
    }
    pos_ += word.size();
    if (word == "X") {
      return Formula::make_next(parse_unary());
    }
    if (word == "G" || word == "F") {
      auto [lo, hi] = parse_interval();
      Formula body = parse_unary();
      return word == "G" ? Formula::make_box(std::move(body), lo, hi)
                         : Formula::make_diamond(std::move(body), lo, hi);
    }
    if (word == "true") {
      return Formula::make_true();
    }
    if (word.size() > 2 && word.substr(0, 2) == "ap" &&
        std::all_of(word.begin() + 2, word.end(), [](char c) {
          return std::isdigit(static_cast<unsigned char>(c));
        })) {
      std::uint64_t index = 0;
      for (char c : word.substr(2)) {
        index = index * 10 + static_cast<std::uint64_t>(c - '0');
        if (index > std::numeric_limits<std::uint32_t>::max()) {
          throw SyntaxError("AP index out of range", start);
        }
      }
      return Formula::make_ap(static_cast<std::uint32_t>(index));
    }
    throw SyntaxError("unknown token '" + std::string(word) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Formula& f) {
  auto interval = [&] {
    return "[" + std::to_string(f.lo()) + "," + std::to_string(f.hi()) + "]";
  };
  switch (f.kind()) {
    case Kind::True:
      return "true";
    case Kind::Ap:
      return "ap" + std::to_string(f.ap_index());
    case Kind::Not:
      return "!" + to_string(f.child(0));
    case Kind::Next:
      return "X " + to_string(f.child(0));
    case Kind::Box:
      return "G" + interval() + " " + to_string(f.child(0));
    case Kind::Diamond:
      return "F" + interval() + " " + to_string(f.child(0));
    case Kind::And:
      return "(" + to_string(f.child(0)) + " & " + to_string(f.child(1)) + ")";
    case Kind::Or:
      return "(" + to_string(f.child(0)) + " | " + to_string(f.child(1)) + ")";
    case Kind::Implies:
      return "(" + to_string(f.child(0)) + " -> " + to_string(f.child(1)) +
             ")";
    case Kind::Until:
      return "(" + to_string(f.child(0)) + " U" + interval() + " " +
             to_string(f.child(1)) + ")";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Metadata

std::optional<Operator> operator_of(Kind k) {
  switch (k) {
    case Kind::Not: return Operator::Not;
    case Kind::And: return Operator::And;
    case Kind::Or: return Operator::Or;
    case Kind::Implies: return Operator::Implies;
    case Kind::Next: return Operator::Next;
    case Kind::Until: return Operator::Until;
    case Kind::Box: return Operator::Box;
    case Kind::Diamond: return Operator::Diamond;
    case Kind::True:
    case Kind::Ap: return std::nullopt;
  }
  return std::nullopt;
}

const char* operator_name(Operator op) {
  switch (op) {
    case Operator::Not: return "not";
    case Operator::And: return "and";
    case Operator::Or: return "or";
    case Operator::Implies: return "implies";
    case Operator::Next: return "next";
    case Operator::Until: return "until";
    case Operator::Box: return "box";
    case Operator::Diamond: return "diamond";
    case Operator::Wire: return "wire";
  }
  return "?";
}

bool is_binary(Operator op) {
  return op == Operator::And || op == Operator::Or ||
         op == Operator::Implies || op == Operator::Until;
}

std::uint32_t latency_l(Operator op, std::uint32_t t2) {
  switch (op) {
    case Operator::Next:
      return 2;
    case Operator::Until:
    case Operator::Box:
    case Operator::Diamond:
      return t2 + 1;
    default:
      return 1;
  }
}

std::uint64_t horizon(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::Ap:
      return 0;
    case Kind::Not:
      return 1 + horizon(f.child(0));
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
      return 1 + std::max(horizon(f.child(0)), horizon(f.child(1)));
    case Kind::Next:
      return 2 + horizon(f.child(0));
    case Kind::Until:
      return std::uint64_t{f.hi()} + 1 +
             std::max(horizon(f.child(0)), horizon(f.child(1)));
    case Kind::Box:
    case Kind::Diamond:
      return std::uint64_t{f.hi()} + 1 + horizon(f.child(0));
  }
  return 0;
}

std::uint64_t semantic_future(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::Ap:
      return 0;
    case Kind::Not:
      return semantic_future(f.child(0));
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
      return std::max(semantic_future(f.child(0)),
                      semantic_future(f.child(1)));
    case Kind::Next:
      return 1 + semantic_future(f.child(0));
    case Kind::Until:
      return std::uint64_t{f.hi()} + std::max(semantic_future(f.child(0)),
                                              semantic_future(f.child(1)));
    case Kind::Box:
    case Kind::Diamond:
      return std::uint64_t{f.hi()} + semantic_future(f.child(0));
  }
  return 0;
}

std::optional<std::uint32_t> max_ap_index(const Formula& f) {
  if (f.kind() == Kind::Ap) return f.ap_index();
  std::optional<std::uint32_t> best;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    auto sub = max_ap_index(f.child(i));
    if (sub && (!best || *sub > *best)) best = sub;
  }
  return best;
}

std::size_t operator_count(const Formula& f) {
  std::size_t n = operator_of(f.kind()) ? 1 : 0;
  for (std::size_t i = 0; i < f.arity(); ++i) n += operator_count(f.child(i));
  return n;
}

std::size_t depth(const Formula& f) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    d = std::max(d, depth(f.child(i)));
  }
  return operator_of(f.kind()) ? d + 1 : d;
}

// ---------------------------------------------------------------------------
// Constant folding

namespace {

FoldResult constant(bool value) { return FoldResult{std::nullopt, value}; }
FoldResult formula(Formula f) { return FoldResult{std::move(f), false}; }

}  // namespace

FoldResult constant_fold(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
      return constant(true);
    case Kind::Ap:
      return formula(f);
    case Kind::Not: {
      auto c = constant_fold(f.child(0));
      if (c.is_constant()) return constant(!c.constant_value);
      return formula(Formula::make_not(*c.formula));
    }
    case Kind::Next:
    case Kind::Box:
    case Kind::Diamond: {
      // Over a constant operand every window sees the same value.
      auto c = constant_fold(f.child(0));
      if (c.is_constant()) return c;
      if (f.kind() == Kind::Next) return formula(Formula::make_next(*c.formula));
      if (f.kind() == Kind::Box) {
        return formula(Formula::make_box(*c.formula, f.lo(), f.hi()));
      }
      return formula(Formula::make_diamond(*c.formula, f.lo(), f.hi()));
    }
    case Kind::And: {
      auto a = constant_fold(f.child(0));
      auto b = constant_fold(f.child(1));
      if ((a.is_constant() && !a.constant_value) ||
          (b.is_constant() && !b.constant_value)) {
        return constant(false);
      }
      if (a.is_constant()) return b;
      if (b.is_constant()) return a;
      return formula(Formula::make_and(*a.formula, *b.formula));
    }
    case Kind::Or: {
      auto a = constant_fold(f.child(0));
      auto b = constant_fold(f.child(1));
      if ((a.is_constant() && a.constant_value) ||
          (b.is_constant() && b.constant_value)) {
        return constant(true);
      }
      if (a.is_constant()) return b;
      if (b.is_constant()) return a;
      return formula(Formula::make_or(*a.formula, *b.formula));
    }
    case Kind::Implies: {
      auto a = constant_fold(f.child(0));
      auto b = constant_fold(f.child(1));
      if (a.is_constant()) return a.constant_value ? b : constant(true);
      if (b.is_constant()) {
        return b.constant_value ? constant(true)
                                : formula(Formula::make_not(*a.formula));
      }
      return formula(Formula::make_implies(*a.formula, *b.formula));
    }
    case Kind::Until: {
      auto a = constant_fold(f.child(0));
      auto b = constant_fold(f.child(1));
      const std::uint32_t lo = f.lo();
      const std::uint32_t hi = f.hi();
      if (b.is_constant()) {
        if (!b.constant_value) return constant(false);
        // Witness j = i + lo; the prefix [i, i+lo) must satisfy lhs.
        if (lo == 0) return constant(true);
        if (a.is_constant()) return a;
        return formula(Formula::make_box(*a.formula, 0, lo - 1));
      }
      if (a.is_constant()) {
        if (a.constant_value) {
          return formula(Formula::make_diamond(*b.formula, lo, hi));
        }
        // Only the empty prefix j = i survives.
        return lo == 0 ? b : constant(false);
      }
      return formula(Formula::make_until(*a.formula, *b.formula, lo, hi));
    }
  }
  return formula(f);
}

}  // namespace mtlmon
