// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtlmon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Formula text rejected. `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class IntervalError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Malformed trace file, or a trace whose width does not cover a formula.
class TraceError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

// Hardware-level invariant violations. These indicate a misprogrammed
// monitor, never bad user input.
class Fault : public Error {
 public:
  using Error::Error;
};

// Que add with no free cell.
class CapacityFault : public Fault {
 public:
  using Fault::Fault;
};

// A Maybe cell reached the deletion point.
class StabilityFault : public Fault {
 public:
  using Fault::Fault;
};

// Two writers touched the same cells in one step, or coalesced intervals
// are not contiguous.
class WriteConflictFault : public Fault {
 public:
  using Fault::Fault;
};

class AllocationError : public Error {
 public:
  enum class Kind {
    PeExhaustion,
    QueExhaustion,
    ApOutOfRange,
    HeadOverflow,
    RouteOverflow,
    InvalidConfig,
  };
  AllocationError(Kind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class BitstreamError : public Error {
 public:
  using Error::Error;
};

// Program latched into the fabric violates a structural rule.
class ProgramError : public Error {
 public:
  using Error::Error;
};

// Programming port misuse (byte while running, step while programming).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace mtlmon
