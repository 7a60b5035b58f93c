// SPDX-License-Identifier: Apache-2.0
#include "mtlmon/que.hpp"

#include "mtlmon/errors.hpp"

namespace mtlmon {

char cell_symbol(Cell c) {
  switch (c) {
    case Cell::Top: return 'T';
    case Cell::Bot: return 'F';
    case Cell::Maybe: return 'M';
  }
  return '?';
}

std::string to_string(const Interval& i) {
  if (i.empty()) return "[]";
  return "[" + std::to_string(i.lo) + "," + std::to_string(i.hi) + "]";
}

QueState::QueState(std::size_t capacity, std::vector<Cell> cells)
    : capacity_(capacity), cells_(std::move(cells)) {
  if (cells_.size() > capacity_) {
    throw CapacityFault("que initialised beyond its capacity");
  }
}

void QueState::add() {
  if (cells_.size() >= capacity_) {
    throw CapacityFault("que add with all " + std::to_string(capacity_) +
                        " cells occupied");
  }
  cells_.insert(cells_.begin(), Cell::Maybe);
}

std::optional<bool> QueState::del(std::size_t head) {
  if (head >= cells_.size()) return std::nullopt;
  Cell c = cells_[head];
  if (c == Cell::Maybe) {
    throw StabilityFault("unresolved Maybe deleted at head " +
                         std::to_string(head));
  }
  cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(head));
  return c == Cell::Top;
}

void QueState::modify(Interval interval, ModifyMode mode) {
  if (interval.empty()) return;
  const Cell to = mode == ModifyMode::TopIfMaybe ? Cell::Top : Cell::Bot;
  for (std::size_t k = interval.lo; k <= interval.hi && k < cells_.size();
       ++k) {
    if (cells_[k] == Cell::Maybe) cells_[k] = to;
  }
}

std::string to_string(const QueState& q) {
  std::string s = "[";
  for (std::size_t i = 0; i < q.occupancy(); ++i) {
    if (i) s += ',';
    s += cell_symbol(q[i]);
  }
  return s + "]";
}

QueState que_add(QueState q) {
  q.add();
  return q;
}

std::pair<QueState, std::optional<bool>> que_del(QueState q,
                                                 std::size_t head) {
  auto v = q.del(head);
  return {std::move(q), v};
}

QueState que_modify(QueState q, Interval interval, ModifyMode mode) {
  q.modify(interval, mode);
  return q;
}

}  // namespace mtlmon
