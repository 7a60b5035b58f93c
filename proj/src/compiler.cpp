// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/compiler.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "mtlmon/errors.hpp"

namespace mtlmon {

void FabricConfig::validate() const {
  if (n_pe == 0 || n_q == 0 || n_ap == 0 || q_sz == 0) {
    throw AllocationError(AllocationError::Kind::InvalidConfig,
                          "fabric dimensions must all be at least 1");
  }
}

std::string to_string(const FabricConfig& cfg) {
  return "nPE=" + std::to_string(cfg.n_pe) + " nQ=" + std::to_string(cfg.n_q) +
         " nAP=" + std::to_string(cfg.n_ap) +
         " qSZ=" + std::to_string(cfg.q_sz);
}

unsigned ceil_log2(std::uint64_t n) {
  unsigned bits = 0;
  while ((std::uint64_t{1} << bits) < n) ++bits;
  return bits;
}

MonitorProgram MonitorProgram::inactive(const FabricConfig& cfg) {
  MonitorProgram p;
  p.pes.assign(cfg.n_pe, PeConfig{});
  p.qs.assign(cfg.n_q, QConfig{});
  p.ap2pe.assign(cfg.n_pe, {0, 0});
  return p;
}

bool TreeNode::is_leaf() const {
  return std::none_of(operands.begin(), operands.end(), [](const auto& o) {
    return o.kind == TreeOperand::Kind::Node;
  });
}

// ---------------------------------------------------------------------------
// Tree construction

MonitorTree insert_balancing_wires(const Formula& f) {
  struct Pending {
    std::optional<Formula> formula;  // unset: wire over `ap`
    std::uint32_t ap = 0;
  };

  MonitorTree tree;
  std::deque<Pending> pending;
  if (f.kind() == Kind::Ap) {
    pending.push_back({std::nullopt, f.ap_index()});
  } else {
    pending.push_back({f});
  }
  std::uint32_t next = 1;

  while (!pending.empty()) {
    Pending item = std::move(pending.front());
    pending.pop_front();
    TreeNode node;
    if (!item.formula) {
      node.op = Operator::Wire;
      node.operands = {{TreeOperand::Kind::Ap, item.ap}};
      tree.nodes.push_back(std::move(node));
      continue;
    }
    const Formula& g = *item.formula;
    auto op = operator_of(g.kind());
    if (!op) {
      throw std::invalid_argument("formula must be constant-folded first");
    }
    node.op = *op;
    if (g.is_temporal()) {
      node.t1 = g.lo();
      node.t2 = g.hi();
    }
    std::size_t ap_children = 0;
    for (std::size_t i = 0; i < g.arity(); ++i) {
      ap_children += g.child(i).kind() == Kind::Ap;
    }
    const bool needs_wire = g.arity() == 2 && ap_children == 1;
    for (std::size_t i = 0; i < g.arity(); ++i) {
      const Formula& c = g.child(i);
      if (c.kind() == Kind::True) {
        throw std::invalid_argument("formula must be constant-folded first");
      }
      if (c.kind() == Kind::Ap && !needs_wire) {
        node.operands.push_back({TreeOperand::Kind::Ap, c.ap_index()});
        continue;
      }
      if (c.kind() == Kind::Ap) {
        pending.push_back({std::nullopt, c.ap_index()});
      } else {
        pending.push_back({c});
      }
      node.operands.push_back({TreeOperand::Kind::Node, next++});
    }
    tree.nodes.push_back(std::move(node));
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Head balancing

namespace {

std::vector<std::uint32_t> child_nodes(const TreeNode& n) {
  std::vector<std::uint32_t> out;
  for (const auto& o : n.operands) {
    if (o.kind == TreeOperand::Kind::Node) out.push_back(o.index);
  }
  return out;
}

std::uint32_t balance(MonitorTree& tree, std::uint32_t idx) {
  TreeNode& node = tree.nodes.at(idx);
  node.head = latency_l(node.op, node.t2);
  const auto kids = child_nodes(node);
  if (kids.empty()) {
    node.height = node.head + 1;
  } else if (kids.size() == 1) {
    const std::uint32_t h = balance(tree, kids[0]);
    tree.nodes[idx].height = tree.nodes[idx].head + 1 + h;
  } else {
    std::uint32_t hl = balance(tree, kids[0]);
    std::uint32_t hr = balance(tree, kids[1]);
    if (hl < hr) {
      tree.nodes[kids[0]].head += hr - hl;
      tree.nodes[kids[0]].height = hr;
      hl = hr;
    } else if (hr < hl) {
      tree.nodes[kids[1]].head += hl - hr;
      tree.nodes[kids[1]].height = hl;
      hr = hl;
    }
    tree.nodes[idx].height = tree.nodes[idx].head + 1 + hl;
  }
  return tree.nodes[idx].height;
}

}  // namespace

void compute_heads(MonitorTree& tree) {
  if (tree.nodes.empty()) return;
  balance(tree, 0);
}

void apply_head_overrides(MonitorTree& tree,
                          std::span<const HeadOverride> overrides) {
  if (overrides.empty()) return;
  for (const auto& o : overrides) {
    if (o.em == 0 || o.em > tree.nodes.size()) {
      throw std::out_of_range("no EM" + std::to_string(o.em) + " in monitor");
    }
    TreeNode& n = tree.nodes[o.em - 1];
    if (o.head < latency_l(n.op, n.t2)) {
      throw std::invalid_argument(
          "EM" + std::to_string(o.em) + " head must be at least " +
          std::to_string(latency_l(n.op, n.t2)));
    }
    n.head = o.head;
  }
  // Children always have larger indices than their parent.
  for (std::size_t i = tree.nodes.size(); i-- > 0;) {
    TreeNode& n = tree.nodes[i];
    std::uint32_t tallest = 0;
    for (auto k : child_nodes(n)) {
      tallest = std::max(tallest, tree.nodes[k].height);
    }
    n.height = n.head + 1 + tallest;
  }
}

// ---------------------------------------------------------------------------
// Allocation

std::uint32_t pe_cost(const TreeNode& node) {
  if (node.op == Operator::Until) return node.t1 == 0 ? 2 : 3;
  return 1;
}

MonitorProgram allocate(MonitorTree& tree, const FabricConfig& cfg) {
  using AE = AllocationError;
  cfg.validate();

  std::uint64_t pes_needed = 0;
  for (const auto& n : tree.nodes) pes_needed += pe_cost(n);
  if (pes_needed > cfg.n_pe) {
    throw AE(AE::Kind::PeExhaustion,
             "PE exhaustion: monitor needs " + std::to_string(pes_needed) +
                 " PEs, fabric has " + std::to_string(cfg.n_pe));
  }
  if (tree.nodes.size() > cfg.n_q) {
    throw AE(AE::Kind::QueExhaustion,
             "Que exhaustion: monitor needs " +
                 std::to_string(tree.nodes.size()) + " Ques, fabric has " +
                 std::to_string(cfg.n_q));
  }
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    for (const auto& o : n.operands) {
      if (o.kind == TreeOperand::Kind::Ap && o.index >= cfg.n_ap) {
        throw AE(AE::Kind::ApOutOfRange,
                 "ap" + std::to_string(o.index) + " exceeds fabric nAP=" +
                     std::to_string(cfg.n_ap));
      }
    }
    if (n.head >= cfg.q_sz) {
      throw AE(AE::Kind::HeadOverflow,
               "EM" + std::to_string(i + 1) + " (" + operator_name(n.op) +
                   ") needs head " + std::to_string(n.head) +
                   " but qSZ=" + std::to_string(cfg.q_sz));
    }
  }

  std::uint32_t next_pe = 0;
  std::uint32_t next_q = 0;
  for (std::size_t i = tree.nodes.size(); i-- > 0;) {
    TreeNode& n = tree.nodes[i];
    n.pes.clear();
    for (std::uint32_t k = 0; k < pe_cost(n); ++k) n.pes.push_back(next_pe++);
    n.que = next_q++;
  }

  MonitorProgram prog = MonitorProgram::inactive(cfg);
  std::vector<bool> reader_taken(cfg.n_q, false);
  const std::uint64_t route_limit = std::uint64_t{1} << ceil_log2(cfg.n_ap);

  for (std::size_t i = tree.nodes.size(); i-- > 0;) {
    const TreeNode& n = tree.nodes[i];
    const EvaluatorMachine em = em_build(n.op, n.t1, n.t2, n.head);
    for (std::size_t k = 0; k < em.ams.size(); ++k) {
      const AmProgram& am = em.ams[k];
      const std::uint32_t pe = n.pes[k];
      PeConfig& pc = prog.pes[pe];
      pc.active = true;
      pc.opcode = am.opcode;
      pc.r_qid = *n.que;
      pc.i_top = am.mod_top ? am.i_top : Interval::none();
      pc.i_bot = am.mod_bot ? am.i_bot : Interval::none();

      std::vector<EmOperand> slots = {am.op0};
      if (am.op1) slots.push_back(*am.op1);
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const TreeOperand& src =
            n.operands.at(slots[s] == EmOperand::Alpha0 ? 0 : 1);
        OperandSource& kind = s == 0 ? pc.op0_src : pc.op1_src;
        if (src.kind == TreeOperand::Kind::Ap) {
          kind = OperandSource::Ap;
          prog.ap2pe[pe][s] = src.index;
          continue;
        }
        kind = OperandSource::Que;
        const std::uint32_t qid = *tree.nodes[src.index].que;
        if (!reader_taken[qid]) {
          reader_taken[qid] = true;
          prog.qs[qid].reader_pe = pe;
          prog.qs[qid].inp_no = static_cast<std::uint8_t>(s);
        } else {
          if (qid >= route_limit) {
            throw AE(AE::Kind::RouteOverflow,
                     "Q" + std::to_string(qid) +
                         " cannot be routed to secondary reader PE" +
                         std::to_string(pe) + " through a " +
                         std::to_string(ceil_log2(cfg.n_ap)) +
                         "-bit AP2PE field");
          }
          prog.ap2pe[pe][s] = qid;
        }
      }
    }
    QConfig& qc = prog.qs[*n.que];
    qc.active = true;
    qc.head = n.head;
    qc.is_verdict = i == 0;
  }
  prog.reported_latency = derive_latency(prog, cfg);
  return prog;
}

Compilation compile(const Formula& f, const FabricConfig& cfg,
                    std::span<const HeadOverride> overrides) {
  Compilation c{f, insert_balancing_wires(f), {}};
  compute_heads(c.tree);
  apply_head_overrides(c.tree, overrides);
  c.program = allocate(c.tree, cfg);
  return c;
}

// ---------------------------------------------------------------------------
// Program structure

std::vector<std::vector<ResolvedOperand>> resolve_operands(
    const MonitorProgram& prog, const FabricConfig& cfg) {
  auto fail = [](const std::string& what) { throw ProgramError(what); };
  if (prog.pes.size() != cfg.n_pe || prog.qs.size() != cfg.n_q ||
      prog.ap2pe.size() != cfg.n_pe) {
    fail("program dimensions do not match the fabric");
  }
  auto in_range = [&](const Interval& iv) {
    return iv.empty() || iv.hi < cfg.q_sz;
  };

  std::size_t verdicts = 0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> primary;
  for (std::uint32_t q = 0; q < cfg.n_q; ++q) {
    const QConfig& qc = prog.qs[q];
    if (!qc.active) continue;
    if (qc.head >= cfg.q_sz) fail("Q" + std::to_string(q) + " head >= qSZ");
    if (qc.is_verdict) {
      ++verdicts;
      continue;
    }
    if (qc.reader_pe >= cfg.n_pe || !prog.pes[qc.reader_pe].active) {
      fail("Q" + std::to_string(q) + " names an inactive reader PE");
    }
    if (qc.inp_no > 1) fail("Q" + std::to_string(q) + " inp_no out of range");
    const PeConfig& reader = prog.pes[qc.reader_pe];
    if (qc.inp_no == 1 && is_unary(reader.opcode)) {
      fail("Q" + std::to_string(q) + " feeds operand 1 of a unary PE");
    }
    const OperandSource src = qc.inp_no == 0 ? reader.op0_src : reader.op1_src;
    if (src != OperandSource::Que) {
      fail("Q" + std::to_string(q) + " feeds a PE operand sourced from an AP");
    }
    auto key = std::make_pair(qc.reader_pe, std::uint32_t{qc.inp_no});
    if (!primary.emplace(key, q).second) {
      fail("two Ques feed operand " + std::to_string(qc.inp_no) + " of PE" +
           std::to_string(qc.reader_pe));
    }
  }
  if (verdicts > 1) fail("more than one verdict Que");

  std::vector<std::vector<ResolvedOperand>> out(cfg.n_pe);
  std::vector<bool> written(cfg.n_q, false);
  for (std::uint32_t pe = 0; pe < cfg.n_pe; ++pe) {
    const PeConfig& pc = prog.pes[pe];
    if (!pc.active) continue;
    const std::string name = "PE" + std::to_string(pe);
    if (static_cast<std::uint8_t>(pc.opcode) > 4) fail(name + " bad opcode");
    if (pc.r_qid >= cfg.n_q || !prog.qs[pc.r_qid].active) {
      fail(name + " writes an inactive Que");
    }
    if (!in_range(pc.i_top) || !in_range(pc.i_bot)) {
      fail(name + " interval exceeds qSZ");
    }
    written[pc.r_qid] = true;
    const std::size_t arity = is_unary(pc.opcode) ? 1 : 2;
    for (std::uint32_t k = 0; k < arity; ++k) {
      const OperandSource src = k == 0 ? pc.op0_src : pc.op1_src;
      const std::uint32_t route = prog.ap2pe[pe][k];
      if (src == OperandSource::Ap) {
        if (route >= cfg.n_ap) fail(name + " routes an AP beyond nAP");
        out[pe].push_back({OperandSource::Ap, route});
        continue;
      }
      auto it = primary.find({pe, k});
      std::uint32_t q = it != primary.end() ? it->second : route;
      if (it == primary.end() &&
          (q >= cfg.n_q || !prog.qs[q].active || prog.qs[q].is_verdict)) {
        fail(name + " operand " + std::to_string(k) +
             " has no valid source Que");
      }
      out[pe].push_back({OperandSource::Que, q});
    }
  }
  for (std::uint32_t q = 0; q < cfg.n_q; ++q) {
    if (prog.qs[q].active && !written[q]) {
      fail("Q" + std::to_string(q) + " is active but has no writer PE");
    }
  }
  return out;
}

std::uint32_t derive_latency(const MonitorProgram& prog,
                             const FabricConfig& cfg) {
  const auto operands = resolve_operands(prog, cfg);
  std::vector<std::vector<std::uint32_t>> sources(cfg.n_q);
  for (std::uint32_t pe = 0; pe < cfg.n_pe; ++pe) {
    for (const auto& o : operands[pe]) {
      if (o.source == OperandSource::Que) {
        sources[prog.pes[pe].r_qid].push_back(o.index);
      }
    }
  }

  enum class Mark : std::uint8_t { Fresh, Open, Done };
  std::vector<Mark> mark(cfg.n_q, Mark::Fresh);
  std::vector<std::uint32_t> delay(cfg.n_q, 0);
  // Iterative DFS; recursion depth would otherwise track nQ.
  for (std::uint32_t start = 0; start < cfg.n_q; ++start) {
    if (!prog.qs[start].active || mark[start] != Mark::Fresh) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::Open;
    while (!stack.empty()) {
      auto& [q, next] = stack.back();
      if (next < sources[q].size()) {
        const std::uint32_t s = sources[q][next++];
        if (mark[s] == Mark::Open) {
          throw ProgramError("dataflow cycle through Q" + std::to_string(s));
        }
        if (mark[s] == Mark::Fresh) {
          mark[s] = Mark::Open;
          stack.push_back({s, 0});
        }
        continue;
      }
      std::uint32_t longest = 0;
      bool fed_by_que = false;
      for (auto s : sources[q]) {
        fed_by_que = true;
        longest = std::max(longest, delay[s]);
      }
      delay[q] = prog.qs[q].head + (fed_by_que ? longest + 1 : 0);
      mark[q] = Mark::Done;
      stack.pop_back();
    }
  }
  for (std::uint32_t q = 0; q < cfg.n_q; ++q) {
    if (prog.qs[q].active && prog.qs[q].is_verdict) return delay[q];
  }
  return 0;
}

}  // namespace mtlmon
