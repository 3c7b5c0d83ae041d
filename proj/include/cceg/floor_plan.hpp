#pragma once
// Floor plan on a 1 m^2 cell grid, plus the text map format reader/writer.
//
// Map grammar: one row per line, all rows the same length.
//   '#'  wall
//   '.'  walkable
//   '1'..'9', 'A'..'E'  exit cell with id 1..14 (each id at most once)

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cceg/errors.hpp"
#include "cceg/grid.hpp"

namespace cceg {

using ExitId = int;

inline constexpr ExitId kMaxExitId = 14;

enum class CellKind : std::uint8_t { Wall, Walkable, Exit };

struct Cell {
  CellKind kind = CellKind::Wall;
  ExitId exit_id = 0;  // non-zero only for Exit cells

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct ExitInfo {
  ExitId id = 0;
  Coord cell;

  friend bool operator==(const ExitInfo&, const ExitInfo&) = default;
};

// Small set of exit ids backed by a bit mask.
class ExitSet {
 public:
  ExitSet() = default;
  ExitSet(std::initializer_list<ExitId> ids) {
    for (ExitId id : ids) insert(id);
  }

  void insert(ExitId id) { bits_ |= bit(id); }
  void erase(ExitId id) { bits_ &= ~bit(id); }
  bool contains(ExitId id) const { return (bits_ & bit(id)) != 0; }
  bool empty() const { return bits_ == 0; }

  friend bool operator==(const ExitSet&, const ExitSet&) = default;

 private:
  static std::uint32_t bit(ExitId id) {
    return (id >= 0 && id < 32) ? (std::uint32_t{1} << id) : 0;
  }
  std::uint32_t bits_ = 0;
};

class FloorPlan {
 public:
  static constexpr double kCellSize = 1.0;  // meters

  FloorPlan() = default;

  // Builds a plan from a cell grid; exits are collected from Exit cells.
  // Throws MapError if an exit id repeats or is out of range.
  explicit FloorPlan(Grid<Cell> cells) : cells_(std::move(cells)) {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const Coord c = cells_.coord(i);
      const Cell& cell = cells_[c];
      if (cell.kind == CellKind::Wall) continue;
      walkable_.push_back(c);
      if (cell.kind != CellKind::Exit) continue;
      if (cell.exit_id < 1 || cell.exit_id > kMaxExitId) {
        throw MapError("exit id " + std::to_string(cell.exit_id) + " out of range 1..14");
      }
      if (find_exit(cell.exit_id)) {
        throw MapError("duplicate exit id " + std::to_string(cell.exit_id));
      }
      exits_.push_back({cell.exit_id, c});
    }
    std::sort(exits_.begin(), exits_.end(),
              [](const ExitInfo& a, const ExitInfo& b) { return a.id < b.id; });
  }

  int width() const { return cells_.width(); }
  int height() const { return cells_.height(); }
  const Grid<Cell>& cells() const { return cells_; }
  const Cell& at(Coord c) const { return cells_[c]; }
  bool in_bounds(Coord c) const { return cells_.in_bounds(c); }

  // Exit cells count as walkable.
  bool walkable(Coord c) const { return in_bounds(c) && cells_[c].kind != CellKind::Wall; }

  // Walkable cells in row-major order.
  const std::vector<Coord>& walkable_cells() const { return walkable_; }
  std::size_t walkable_count() const { return walkable_.size(); }

  // Sorted by id.
  const std::vector<ExitInfo>& exits() const { return exits_; }
  ExitId max_exit_id() const { return exits_.empty() ? 0 : exits_.back().id; }

  std::optional<Coord> find_exit(ExitId id) const {
    for (const auto& e : exits_)
      if (e.id == id) return e.cell;
    return std::nullopt;
  }
  bool has_exit(ExitId id) const { return find_exit(id).has_value(); }

  friend bool operator==(const FloorPlan& a, const FloorPlan& b) { return a.cells_ == b.cells_; }

 private:
  Grid<Cell> cells_;
  std::vector<Coord> walkable_;
  std::vector<ExitInfo> exits_;
};

inline char exit_symbol(ExitId id) {
  return id <= 9 ? static_cast<char>('0' + id) : static_cast<char>('A' + (id - 10));
}

inline std::optional<ExitId> exit_from_symbol(char ch) {
  if (ch >= '1' && ch <= '9') return ch - '0';
  if (ch >= 'A' && ch <= 'E') return 10 + (ch - 'A');
  return std::nullopt;
}

inline FloorPlan parse_map(std::string_view text) {
  std::vector<std::string_view> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(start, end - start);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    rows.push_back(row);
    start = end + 1;
  }
  // Trailing blank lines are tolerated; blank lines elsewhere are ragged rows.
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw MapError("map is empty");

  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  Grid<Cell> cells(width, height);
  std::vector<Coord> seen_exit(kMaxExitId + 1, Coord{-1, -1});

  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width) {
      throw MapError("ragged row: expected " + std::to_string(width) + " columns, got " +
                         std::to_string(rows[y].size()),
                     y + 1, static_cast<int>(std::min<std::size_t>(rows[y].size(), width)) + 1);
    }
    for (int x = 0; x < width; ++x) {
      const char ch = rows[y][x];
      Cell& cell = cells[{x, y}];
      if (ch == '#') {
        cell.kind = CellKind::Wall;
      } else if (ch == '.') {
        cell.kind = CellKind::Walkable;
      } else if (auto id = exit_from_symbol(ch)) {
        if (seen_exit[*id].x >= 0) {
          throw MapError(std::string("duplicate exit id '") + ch + "' (first at line " +
                             std::to_string(seen_exit[*id].y + 1) + ", column " +
                             std::to_string(seen_exit[*id].x + 1) + ")",
                         y + 1, x + 1);
        }
        seen_exit[*id] = {x, y};
        cell.kind = CellKind::Exit;
        cell.exit_id = *id;
      } else {
        throw MapError(std::string("unknown symbol '") + ch + "'", y + 1, x + 1);
      }
    }
  }
  FloorPlan plan(std::move(cells));
  if (plan.exits().empty()) throw MapError("map has no exits");
  return plan;
}

inline std::string render_map(const FloorPlan& plan) {
  std::string out;
  out.reserve(static_cast<std::size_t>(plan.width() + 1) * plan.height());
  for (int y = 0; y < plan.height(); ++y) {
    for (int x = 0; x < plan.width(); ++x) {
      const Cell& c = plan.at({x, y});
      switch (c.kind) {
        case CellKind::Wall: out += '#'; break;
        case CellKind::Walkable: out += '.'; break;
        case CellKind::Exit: out += exit_symbol(c.exit_id); break;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace cceg
