#pragma once
// Per-exit BFS hop-count fields and nearest-exit queries.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cceg/floor_plan.hpp"

namespace cceg {

class DistanceField {
 public:
  static constexpr int kUnreachable = std::numeric_limits<int>::max();

  DistanceField() = default;
  DistanceField(ExitId exit_id, Grid<int> dist) : exit_id_(exit_id), dist_(std::move(dist)) {}

  ExitId exit_id() const { return exit_id_; }
  int at(Coord c) const { return dist_[c]; }
  bool reachable(Coord c) const { return dist_.in_bounds(c) && dist_[c] != kUnreachable; }
  const Grid<int>& grid() const { return dist_; }

 private:
  ExitId exit_id_ = 0;
  Grid<int> dist_;
};

// 4-connected BFS over walkable cells from the exit cell.
inline DistanceField distance_field(const FloorPlan& plan, ExitId exit_id) {
  const auto source = plan.find_exit(exit_id);
  if (!source) throw RoutingError("unknown exit id " + std::to_string(exit_id));

  Grid<int> dist(plan.width(), plan.height(), DistanceField::kUnreachable);
  std::vector<Coord> frontier{*source};
  std::vector<Coord> next;
  dist[*source] = 0;
  for (int d = 1; !frontier.empty(); ++d) {
    for (Coord c : frontier) {
      for (Coord off : kNeighborOffsets) {
        const Coord nb = c + off;
        if (plan.walkable(nb) && dist[nb] == DistanceField::kUnreachable) {
          dist[nb] = d;
          next.push_back(nb);
        }
      }
    }
    frontier.swap(next);
    next.clear();
  }
  return DistanceField(exit_id, std::move(dist));
}

// Distance fields for every exit of a plan, indexed by exit id.
class ExitFields {
 public:
  ExitFields() = default;
  explicit ExitFields(const FloorPlan& plan) : fields_(plan.max_exit_id() + 1) {
    for (const auto& e : plan.exits()) {
      fields_[e.id] = distance_field(plan, e.id);
      ids_.push_back(e.id);
    }
  }

  const DistanceField& operator[](ExitId id) const {
    if (!has(id)) throw RoutingError("unknown exit id " + std::to_string(id));
    return fields_[id];
  }
  bool has(ExitId id) const {
    return id > 0 && id < static_cast<ExitId>(fields_.size()) && fields_[id].exit_id() == id;
  }
  // Ascending.
  const std::vector<ExitId>& exit_ids() const { return ids_; }

 private:
  std::vector<DistanceField> fields_;
  std::vector<ExitId> ids_;
};

// Reachable, non-blocked exit with minimal hop distance from `cell`; ties go to
// the smallest exit id.
inline ExitId nearest_exit(const ExitFields& fields, Coord cell, const ExitSet& blocked) {
  ExitId best = 0;
  int best_dist = DistanceField::kUnreachable;
  for (ExitId id : fields.exit_ids()) {
    if (blocked.contains(id)) continue;
    const int d = fields[id].reachable(cell) ? fields[id].at(cell) : DistanceField::kUnreachable;
    if (d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  if (best == 0) {
    throw RoutingError("no reachable non-blocked exit from (" + std::to_string(cell.x) + ", " +
                       std::to_string(cell.y) + ")");
  }
  return best;
}

inline ExitId nearest_exit(const FloorPlan& plan, Coord cell, const ExitSet& blocked) {
  if (!plan.walkable(cell)) throw RoutingError("query cell is not walkable");
  return nearest_exit(ExitFields(plan), cell, blocked);
}

// First exit whose field is unreachable from some walkable cell, if any.
inline std::optional<ExitId> first_unreachable_exit(const FloorPlan& plan,
                                                    const ExitFields& fields) {
  for (ExitId id : fields.exit_ids())
    for (Coord c : plan.walkable_cells())
      if (!fields[id].reachable(c)) return id;
  return std::nullopt;
}

}  // namespace cceg
