#pragma once
// Agents: spawning, PA reception, sign perception, target choice and move
// proposals. The engine owns the population and sequences these calls.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cceg/agent.hpp"
#include "cceg/distance_field.hpp"
#include "cceg/rng.hpp"
#include "cceg/signage.hpp"

namespace cceg {

// Positions are drawn uniformly over walkable cells with replacement, then the
// compliance flag, one agent at a time.
inline std::vector<Agent> spawn_agents(const FloorPlan& plan, int n, double p, Rng& rng) {
  if (n < 0) throw ConfigError("agent count must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("compliance probability must be in [0, 1]");
  if (n > 0 && plan.walkable_count() == 0) throw ConfigError("plan has no walkable cells");

  std::vector<Agent> agents;
  agents.reserve(static_cast<std::size_t>(n));
  const auto& cells = plan.walkable_cells();
  for (int i = 0; i < n; ++i) {
    Agent a;
    a.id = i;
    a.pos = cells[rng.below(cells.size())];
    a.compliant = rng.bernoulli(p);
    agents.push_back(a);
  }
  return agents;
}

inline void validate_pa(const PaMessage& pa, const FloorPlan& plan) {
  if (pa.blocked_exit == pa.designated_exit) {
    throw ConfigError("PA designates the blocked exit " + std::to_string(pa.blocked_exit));
  }
  if (!plan.has_exit(pa.designated_exit)) {
    throw ConfigError("PA designated exit " + std::to_string(pa.designated_exit) +
                      " does not exist");
  }
}

// Every agent still inside retargets to the designated exit; the blocked exit is
// added to `blocked` so no later decision can select it.
inline void receive_pa(std::span<Agent> agents, const PaMessage& pa, const FloorPlan& plan,
                       const ExitFields& fields, ExitSet& blocked) {
  validate_pa(pa, plan);
  const DistanceField& field = fields[pa.designated_exit];
  for (Coord c : plan.walkable_cells()) {
    if (!field.reachable(c)) {
      throw ConfigError("designated exit " + std::to_string(pa.designated_exit) +
                        " is unreachable from (" + std::to_string(c.x) + ", " +
                        std::to_string(c.y) + ")");
    }
  }
  blocked.insert(pa.blocked_exit);
  for (Agent& a : agents) {
    if (!a.evacuated()) a.target = pa.designated_exit;
  }
}

struct VisibleSign {
  int index = 0;  // position in the sign list
  double distance = 0.0;
};

// Signs within their visibility radius (center to center, inclusive), nearest
// first, ties by sign id. Walls do not occlude.
inline std::vector<VisibleSign> perceive_signs(Coord pos, std::span<const Sign> signs) {
  std::vector<VisibleSign> out;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const double d2 = squared_distance(pos, signs[i].pos);
    const double r = signs[i].visibility_radius;
    if (d2 <= r * r) out.push_back({static_cast<int>(i), std::sqrt(d2)});
  }
  std::stable_sort(out.begin(), out.end(), [&](const VisibleSign& a, const VisibleSign& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return signs[a.index].id < signs[b.index].id;
  });
  return out;
}

inline std::vector<VisibleSign> perceive_signs(const Agent& agent, std::span<const Sign> signs) {
  return perceive_signs(agent.pos, signs);
}

// A compliant agent adopts the exit shown by the nearest visible sign that is
// displaying guidance. Returns whether the target changed.
inline bool decide_target(Agent& agent, std::span<const VisibleSign> visible,
                          std::span<const Sign> signs) {
  if (agent.evacuated() || !agent.compliant) return false;
  for (const VisibleSign& v : visible) {
    const Sign& s = signs[v.index];
    if (!s.displayed_exit) continue;
    const bool changed = agent.target != s.displayed_exit;
    agent.target = s.displayed_exit;
    return changed;
  }
  return false;
}

// Neighbor that strictly decreases the target's distance field, first in
// N, E, S, W order; the current cell when none does.
inline Coord plan_move(const Agent& agent, const FloorPlan& plan, const ExitFields& fields) {
  if (!agent.target) return agent.pos;
  const DistanceField& field = fields[*agent.target];
  if (!field.reachable(agent.pos)) {
    throw RoutingError("agent " + std::to_string(agent.id) + " cannot reach exit " +
                       std::to_string(*agent.target));
  }
  const int here = field.at(agent.pos);
  for (Coord off : kNeighborOffsets) {
    const Coord nb = agent.pos + off;
    if (plan.walkable(nb) && field.at(nb) < here) return nb;
  }
  return agent.pos;
}

}  // namespace cceg
