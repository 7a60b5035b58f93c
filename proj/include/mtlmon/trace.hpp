// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mtlmon {

/// Finite run of the system under verification: one AP valuation per step.
class Trace {
 public:
  explicit Trace(std::size_t width = 0) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t length() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  const std::vector<bool>& event(std::size_t step) const {
    return events_.at(step);
  }
  bool at(std::size_t step, std::size_t ap) const {
    return events_.at(step).at(ap);
  }

  // Throws TraceError when the event width differs from width().
  void push_back(std::vector<bool> event);

  // Steps [begin, end).
  Trace slice(std::size_t begin, std::size_t end) const;

  bool operator==(const Trace&) const = default;

 private:
  std::size_t width_;
  std::vector<std::vector<bool>> events_;
};

/// Reads `time,ap0,...,ap<W-1>` CSV with consecutive times from 0.
Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);
void write_trace(std::ostream& out, const Trace& trace);

/// Verdicts for times 0..size()-1; index is the time step.
struct VerdictStream {
  std::vector<bool> values;

  std::size_t size() const { return values.size(); }
  // Largest time with a determined verdict, if any.
  std::optional<std::uint64_t> defined_bound() const {
    if (values.empty()) return std::nullopt;
    return values.size() - 1;
  }
  bool operator==(const VerdictStream&) const = default;
};

/// A verdict emitted by a running monitor.
struct Verdict {
  std::uint64_t time;
  bool value;
  bool operator==(const Verdict&) const = default;
};

/// Writes `time,verdict` rows (no header).
void write_verdicts(std::ostream& out, const std::vector<Verdict>& verdicts);

}  // namespace mtlmon
