// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the unit tests and the acceptance runner, including a
// reference evaluator written independently of the library's oracle.
#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "mtlmon/formula.hpp"
#include "mtlmon/trace.hpp"

namespace testsupport {

using mtlmon::Formula;
using mtlmon::Kind;
using mtlmon::Trace;

// Rows of 0/1 integers, one row per time step.
inline Trace make_trace(std::size_t width,
                        std::initializer_list<std::vector<int>> rows) {
  Trace t(width);
  for (const auto& r : rows) {
    std::vector<bool> e;
    for (int v : r) e.push_back(v != 0);
    t.push_back(e);
  }
  return t;
}

inline Trace random_trace(std::mt19937_64& rng, std::size_t width,
                          std::size_t length) {
  Trace t(width);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<bool> e(width);
    for (std::size_t k = 0; k < width; ++k) e[k] = (rng() & 1u) != 0;
    t.push_back(e);
  }
  return t;
}

// Events a verdict depends on beyond its own time step.
inline std::uint64_t ref_future(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::Ap: return 0;
    case Kind::Not: return ref_future(f.child(0));
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
      return std::max(ref_future(f.child(0)), ref_future(f.child(1)));
    case Kind::Next: return 1 + ref_future(f.child(0));
    case Kind::Box:
    case Kind::Diamond: return f.hi() + ref_future(f.child(0));
    case Kind::Until:
      return f.hi() +
             std::max(ref_future(f.child(0)), ref_future(f.child(1)));
  }
  return 0;
}

// Direct recursive reading of the bounded MTL semantics at time i.
inline bool ref_holds(const Formula& f, const Trace& t, std::size_t i) {
  switch (f.kind()) {
    case Kind::True: return true;
    case Kind::Ap: return t.at(i, f.ap_index());
    case Kind::Not: return !ref_holds(f.child(0), t, i);
    case Kind::And:
      return ref_holds(f.child(0), t, i) && ref_holds(f.child(1), t, i);
    case Kind::Or:
      return ref_holds(f.child(0), t, i) || ref_holds(f.child(1), t, i);
    case Kind::Implies:
      return !ref_holds(f.child(0), t, i) || ref_holds(f.child(1), t, i);
    case Kind::Next: return ref_holds(f.child(0), t, i + 1);
    case Kind::Box:
      for (std::size_t j = i + f.lo(); j <= i + f.hi(); ++j) {
        if (!ref_holds(f.child(0), t, j)) return false;
      }
      return true;
    case Kind::Diamond:
      for (std::size_t j = i + f.lo(); j <= i + f.hi(); ++j) {
        if (ref_holds(f.child(0), t, j)) return true;
      }
      return false;
    case Kind::Until:
      for (std::size_t j = i + f.lo(); j <= i + f.hi(); ++j) {
        if (!ref_holds(f.child(1), t, j)) continue;
        bool ok = true;
        for (std::size_t k = i; k < j && ok; ++k) {
          ok = ref_holds(f.child(0), t, k);
        }
        if (ok) return true;
      }
      return false;
  }
  return false;
}

inline std::vector<bool> ref_verdicts(const Formula& f, const Trace& t) {
  std::vector<bool> out;
  const std::uint64_t n = ref_future(f);
  for (std::size_t i = 0; i + n < t.length(); ++i) {
    out.push_back(ref_holds(f, t, i));
  }
  return out;
}

}  // namespace testsupport
