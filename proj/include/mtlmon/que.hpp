// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mtlmon {

enum class Cell : std::uint8_t { Top, Bot, Maybe };

char cell_symbol(Cell c);  // 'T', 'F', 'M'

/// Closed interval of queue indices. lo > hi encodes the empty interval.
struct Interval {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;

  static Interval closed(std::uint32_t lo, std::uint32_t hi) { return {lo, hi}; }
  static Interval none() { return {1, 0}; }
  // [lo, hi] with signed bounds; empty whenever hi < lo.
  static Interval span(std::int64_t lo, std::int64_t hi) {
    if (hi < lo || hi < 0) return none();
    return {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
  }

  bool empty() const { return lo > hi; }
  bool contains(std::uint32_t i) const { return lo <= i && i <= hi; }
  bool operator==(const Interval&) const = default;
};

std::string to_string(const Interval& i);

enum class ModifyMode : std::uint8_t { TopIfMaybe, BotIfMaybe };

/// Bounded buffer over {T, F, Maybe}. Index 0 is the tail (newest cell);
/// only indices below occupancy() hold values.
class QueState {
 public:
  explicit QueState(std::size_t capacity) : capacity_(capacity) {}
  // Throws CapacityFault if cells.size() > capacity.
  QueState(std::size_t capacity, std::vector<Cell> cells);

  std::size_t capacity() const { return capacity_; }
  std::size_t occupancy() const { return cells_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }
  Cell operator[](std::size_t i) const { return cells_.at(i); }

  // Shift up and insert Maybe at the tail. Throws CapacityFault when full.
  void add();
  // Remove the cell at `head` and return its value; nothing happens if
  // the cell is empty. Throws StabilityFault if the cell holds Maybe.
  std::optional<bool> del(std::size_t head);
  // Resolve Maybe cells inside `interval`; empty cells are skipped.
  void modify(Interval interval, ModifyMode mode);

  bool operator==(const QueState&) const = default;

 private:
  std::size_t capacity_;
  std::vector<Cell> cells_;
};

std::string to_string(const QueState& q);  // e.g. "[M,F,T]"

QueState que_add(QueState q);
std::pair<QueState, std::optional<bool>> que_del(QueState q, std::size_t head);
QueState que_modify(QueState q, Interval interval, ModifyMode mode);

}  // namespace mtlmon
