// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/oracle.hpp"

#include "mtlmon/errors.hpp"

namespace mtlmon {

namespace {

// Truth values of `f` at every time whose verdict the trace determines.
std::vector<bool> satisfaction(const Formula& f, const Trace& tr) {
  const std::uint64_t len = tr.length();
  const std::uint64_t need = semantic_future(f);
  const std::size_t n = need < len ? static_cast<std::size_t>(len - need) : 0;
  std::vector<bool> out(n);

  switch (f.kind()) {
    case Kind::True:
      out.assign(n, true);
      break;
    case Kind::Ap:
      for (std::size_t i = 0; i < n; ++i) out[i] = tr.at(i, f.ap_index());
      break;
    case Kind::Not: {
      auto a = satisfaction(f.child(0), tr);
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
      break;
    }
    case Kind::And:
    case Kind::Or:
    case Kind::Implies: {
      auto a = satisfaction(f.child(0), tr);
      auto b = satisfaction(f.child(1), tr);
      for (std::size_t i = 0; i < n; ++i) {
        if (f.kind() == Kind::And) out[i] = a[i] && b[i];
        if (f.kind() == Kind::Or) out[i] = a[i] || b[i];
        if (f.kind() == Kind::Implies) out[i] = !a[i] || b[i];
      }
      break;
    }
    case Kind::Next: {
      auto a = satisfaction(f.child(0), tr);
      for (std::size_t i = 0; i < n; ++i) out[i] = a[i + 1];
      break;
    }
    case Kind::Box: {
      auto a = satisfaction(f.child(0), tr);
      for (std::size_t i = 0; i < n; ++i) {
        bool all = true;
        for (std::size_t j = i + f.lo(); j <= i + f.hi(); ++j) all = all && a[j];
        out[i] = all;
      }
      break;
    }
    case Kind::Diamond: {
      auto a = satisfaction(f.child(0), tr);
      for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = i + f.lo(); j <= i + f.hi(); ++j) any = any || a[j];
        out[i] = any;
      }
      break;
    }
    case Kind::Until: {
      auto a = satisfaction(f.child(0), tr);
      auto b = satisfaction(f.child(1), tr);
      for (std::size_t i = 0; i < n; ++i) {
        bool holds = false;
        for (std::size_t j = i + f.lo(); j <= i + f.hi() && !holds; ++j) {
          if (!b[j]) continue;
          bool prefix = true;
          for (std::size_t k = i; k < j; ++k) prefix = prefix && a[k];
          holds = prefix;
        }
        out[i] = holds;
      }
      break;
    }
  }
  return out;
}

}  // namespace

VerdictStream oracle_verdicts(const Formula& f, const Trace& trace) {
  if (auto top = max_ap_index(f); top && *top >= trace.width()) {
    throw TraceError("trace width " + std::to_string(trace.width()) +
                     " does not cover ap" + std::to_string(*top));
  }
  return VerdictStream{satisfaction(f, trace)};
}

}  // namespace mtlmon
