// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtlmon/formula.hpp"
#include "mtlmon/machine.hpp"
#include "mtlmon/que.hpp"

namespace mtlmon {

/// Fabric dimensions fixed at design time.
struct FabricConfig {
  std::uint32_t n_pe = 16;
  std::uint32_t n_q = 16;
  std::uint32_t n_ap = 16;
  std::uint32_t q_sz = 256;

  // Throws AllocationError(InvalidConfig) when any dimension is zero.
  void validate() const;
  bool operator==(const FabricConfig&) const = default;
};

std::string to_string(const FabricConfig& cfg);

/// Smallest b with 2^b >= n (0 for n <= 1).
unsigned ceil_log2(std::uint64_t n);

enum class OperandSource : std::uint8_t { Ap = 0, Que = 1 };

/// Processing Element programming record, one field per hardware field.
struct PeConfig {
  bool active = false;
  OperandSource op0_src = OperandSource::Ap;
  OperandSource op1_src = OperandSource::Ap;
  Opcode opcode = Opcode::Wire;
  std::uint32_t r_qid = 0;
  Interval i_top;
  Interval i_bot;

  bool operator==(const PeConfig&) const = default;
};

/// Que programming record.
struct QConfig {
  bool active = false;
  bool is_verdict = false;
  std::uint32_t reader_pe = 0;
  std::uint8_t inp_no = 0;
  std::uint32_t head = 0;

  bool operator==(const QConfig&) const = default;
};

/// Complete fabric configuration.
///
/// `ap2pe[pe][k]` is the AP index routed to operand k of the PE when that
/// operand's source is Ap. When the source is Que and no Que names
/// (pe, k) as its primary reader, the same field carries the id of the
/// Que to read instead (fan-out to secondary readers, needed by Until).
struct MonitorProgram {
  std::vector<PeConfig> pes;
  std::vector<QConfig> qs;
  std::vector<std::array<std::uint32_t, 2>> ap2pe;
  // Cycles between an event entering the fabric and its verdict leaving.
  std::uint32_t reported_latency = 0;

  static MonitorProgram inactive(const FabricConfig& cfg);
  bool operator==(const MonitorProgram&) const = default;
};

/// Operand of a monitor tree node: a raw AP or another node's output.
struct TreeOperand {
  enum class Kind : std::uint8_t { Ap, Node } kind = Kind::Ap;
  std::uint32_t index = 0;

  bool operator==(const TreeOperand&) const = default;
};

/// One Evaluator Machine in the monitor, with its balancing plan.
struct TreeNode {
  Operator op = Operator::Wire;
  std::uint32_t t1 = 0;
  std::uint32_t t2 = 0;
  std::vector<TreeOperand> operands;
  std::uint32_t head = 0;
  std::uint32_t height = 0;
  std::vector<std::uint32_t> pes;
  std::optional<std::uint32_t> que;

  bool is_leaf() const;
};

/// Nodes in breadth-first order; nodes[0] is the root. The 1-based
/// position of a node is its EM number (EM1 is the root).
struct MonitorTree {
  std::vector<TreeNode> nodes;

  std::uint32_t root_height() const { return nodes.at(0).height; }
};

/// Builds the tree for a True-free formula. A binary operator with exactly
/// one raw-AP operand gets that AP wrapped in a wire node so both operands
/// can be time-aligned; a bare AP formula becomes a single wire node.
/// Throws std::invalid_argument if `f` still contains True.
MonitorTree insert_balancing_wires(const Formula& f);

/// Sets every node's head and height by recursive balancing: heads start
/// at latency_l, and the shorter child of a binary node has its head raised
/// by the height difference.
void compute_heads(MonitorTree& tree);

struct HeadOverride {
  std::uint32_t em = 0;  // 1-based EM number
  std::uint32_t head = 0;
};

/// Debug hook: forces the given heads after balancing and recomputes
/// heights without rebalancing. Throws std::out_of_range on a bad EM number.
void apply_head_overrides(MonitorTree& tree,
                          std::span<const HeadOverride> overrides);

/// PEs consumed by a node: 3 for Until with t1 >= 1, 2 for Until with
/// t1 == 0, 1 otherwise.
std::uint32_t pe_cost(const TreeNode& node);

/// Assigns PEs and Ques in reverse breadth-first order and emits the fabric
/// programming. Throws AllocationError.
MonitorProgram allocate(MonitorTree& tree, const FabricConfig& cfg);

struct Compilation {
  Formula source;
  MonitorTree tree;
  MonitorProgram program;
};

/// Full pipeline for a True-free formula.
Compilation compile(const Formula& f, const FabricConfig& cfg,
                    std::span<const HeadOverride> overrides = {});

/// Where a PE operand gets its value once the program is latched.
struct ResolvedOperand {
  OperandSource source = OperandSource::Ap;
  std::uint32_t index = 0;  // AP index or Que id
};

/// Resolved operand sources per active PE (empty vector for inactive PEs).
/// Throws ProgramError on any structural violation: dangling Que ids,
/// duplicated readers, cycles, more than one verdict Que, and so on.
std::vector<std::vector<ResolvedOperand>> resolve_operands(
    const MonitorProgram& prog, const FabricConfig& cfg);

/// Verdict latency implied by the Que heads and the dataflow graph.
/// Zero when the program has no verdict Que. Throws ProgramError.
std::uint32_t derive_latency(const MonitorProgram& prog,
                             const FabricConfig& cfg);

}  // namespace mtlmon
