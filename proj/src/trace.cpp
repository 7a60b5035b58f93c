// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/trace.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mtlmon/errors.hpp"

namespace mtlmon {

void Trace::push_back(std::vector<bool> event) {
  if (event.size() != width_) {
    throw TraceError("event width " + std::to_string(event.size()) +
                     " does not match trace width " + std::to_string(width_));
  }
  events_.push_back(std::move(event));
}

Trace Trace::slice(std::size_t begin, std::size_t end) const {
  Trace out(width_);
  for (std::size_t i = begin; i < end && i < events_.size(); ++i) {
    out.events_.push_back(events_[i]);
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
      field.pop_back();
    }
    while (!field.empty() && field.front() == ' ') field.erase(0, 1);
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

Trace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw TraceError("trace is missing its header line");
  }
  auto header = split_csv(line);
  if (header.empty() || header[0] != "time") {
    throw TraceError("trace header must start with 'time'");
  }
  for (std::size_t i = 1; i < header.size(); ++i) {
    if (header[i] != "ap" + std::to_string(i - 1)) {
      throw TraceError("trace header column " + std::to_string(i) +
                       " must be 'ap" + std::to_string(i - 1) + "'");
    }
  }
  Trace trace(header.size() - 1);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw TraceError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    if (fields[0] != std::to_string(trace.length())) {
      throw TraceError("line " + std::to_string(line_no) + ": expected time " +
                       std::to_string(trace.length()));
    }
    std::vector<bool> event;
    event.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i] != "0" && fields[i] != "1") {
        throw TraceError("line " + std::to_string(line_no) +
                         ": AP values must be 0 or 1");
      }
      event.push_back(fields[i] == "1");
    }
    trace.push_back(std::move(event));
  }
  return trace;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file '" + path + "'");
  return read_trace(in);
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "time";
  for (std::size_t i = 0; i < trace.width(); ++i) out << ",ap" << i;
  out << '\n';
  for (std::size_t t = 0; t < trace.length(); ++t) {
    out << t;
    for (bool v : trace.event(t)) out << ',' << (v ? '1' : '0');
    out << '\n';
  }
}

void write_verdicts(std::ostream& out, const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    out << v.time << ',' << (v.value ? 1 : 0) << '\n';
  }
}

}  // namespace mtlmon
