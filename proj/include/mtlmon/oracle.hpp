// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mtlmon/formula.hpp"
#include "mtlmon/trace.hpp"

namespace mtlmon {

/// Reference evaluator: expands the MTL quantifiers directly over the
/// trace. Emits a verdict for every time i with
/// i + semantic_future(f) < trace.length().
///
/// Throws TraceError when the trace is narrower than the formula's APs.
VerdictStream oracle_verdicts(const Formula& f, const Trace& trace);

}  // namespace mtlmon
