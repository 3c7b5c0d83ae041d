#pragma once
// Stepped evacuation simulation.
//
// Each step runs, in order:
//   1. PA broadcast and sign activation (only at `pa_step`)
//   2. decisions: every agent inside looks at the signs and may retarget
//   3. movement: proposals processed in a seeded random order; a move succeeds
//      if the destination holds fewer than `cell_capacity` agents, or (with
//      `allow_swap`) by trading places with an occupant heading the opposite
//      way; agents standing on their target exit afterwards are evacuated
//   4. controller: congestion-mode signs sense density and may change display
//   5. metrics
//
// Record k of the metrics describes the state after k completed steps.

#include <algorithm>
#include <cstdio>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cceg/config.hpp"
#include "cceg/distance_field.hpp"
#include "cceg/population.hpp"
#include "cceg/rng.hpp"
#include "cceg/signage.hpp"

namespace cceg {

// Plan, routing fields and the sign layout: immutable, shared between runs.
struct Scenario {
  FloorPlan plan;
  ExitFields fields;
  std::vector<Coord> layout;

  Scenario(FloorPlan p, std::vector<Coord> l)
      : plan(std::move(p)), fields(plan), layout(std::move(l)) {}
};

struct StepRecord {
  int step = 0;
  int evacuated = 0;
  double rate = 0.0;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

// Display change. `step` is the first step whose decision phase sees the new
// display; old_exit 0 means the sign was inactive.
struct SignChange {
  int step = 0;
  int sign_id = 0;
  ExitId old_exit = 0;
  ExitId new_exit = 0;
  double density = 0.0;

  friend bool operator==(const SignChange&, const SignChange&) = default;
};

struct MetricsSeries {
  int n = 0;
  std::vector<StepRecord> records;
  std::vector<SignChange> sign_changes;
  std::string config_echo;
  bool capped = false;  // stopped at max_steps with agents still inside

  int final_step() const { return records.empty() ? 0 : records.back().step; }

  friend bool operator==(const MetricsSeries&, const MetricsSeries&) = default;
};

// Evacuated fraction after t steps; t past the last record reads the last
// record.
inline double evacuation_rate(const MetricsSeries& m, int t) {
  if (t < 0) throw ConfigError("negative step " + std::to_string(t));
  if (m.records.empty()) throw ConfigError("empty metrics series");
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), m.records.size() - 1);
  return m.records[i].rate;
}

// First step at which the evacuated share reaches `percent`, nullopt if never.
inline std::optional<int> time_to_percent(const MetricsSeries& m, int percent) {
  for (const StepRecord& r : m.records) {
    if (m.n == 0 || static_cast<long>(r.evacuated) * 100 >= static_cast<long>(percent) * m.n)
      return r.step;
  }
  return std::nullopt;
}

class Simulation {
 public:
  Simulation(std::shared_ptr<const Scenario> scenario, SimConfig config)
      : scenario_(std::move(scenario)), config_(std::move(config)), rng_(config_.seed) {
    check_config();
    init(spawn_agents(scenario_->plan, config_.n, config_.p, rng_));
  }

  // Hand-placed population (ids 0..n-1, walkable cells); no spawn draws are
  // taken from the RNG stream.
  Simulation(std::shared_ptr<const Scenario> scenario, SimConfig config, std::vector<Agent> agents)
      : scenario_(std::move(scenario)), config_(std::move(config)), rng_(config_.seed) {
    config_.n = static_cast<int>(agents.size());
    check_config();
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const Agent& a = agents[i];
      if (a.id != static_cast<int>(i)) throw ConfigError("agent ids must be 0..n-1 in order");
      if (!scenario_->plan.walkable(a.pos))
        throw ConfigError("agent " + std::to_string(a.id) + " placed off the walkable area");
      if (a.evacuated() || a.target)
        throw ConfigError("agent " + std::to_string(a.id) + " must start without target");
    }
    init(std::move(agents));
  }

  bool finished() const { return remaining() == 0 || step_ >= config_.max_steps; }

  void step() {
    if (finished()) return;
    const int k = step_;
    if (k == config_.pa_step) fire_pa(k);
    if (pa_fired_) {
      decide();
      move(k);
      if (config_.controller.mode == DisplayMode::Congestion) control(k);
    }
    step_ = k + 1;
    metrics_.records.push_back({step_, evacuated_,
                                static_cast<double>(evacuated_) / static_cast<double>(config_.n)});
    metrics_.capped = finished() && remaining() > 0;
  }

  void run_to_end() {
    while (!finished()) step();
  }

  int current_step() const { return step_; }
  int evacuated() const { return evacuated_; }
  int remaining() const { return config_.n - evacuated_; }
  const SimConfig& config() const { return config_; }
  const Scenario& scenario() const { return *scenario_; }
  std::span<const Agent> agents() const { return agents_; }
  std::span<const Sign> signs() const { return signs_; }
  const Grid<int>& occupancy() const { return occupancy_; }
  const ExitSet& blocked() const { return blocked_; }
  const MetricsSeries& metrics() const { return metrics_; }
  MetricsSeries take_metrics() { return std::move(metrics_); }

 private:
  void check_config() const {
    validate(config_);
    const FloorPlan& plan = scenario_->plan;
    validate_pa(config_.pa, plan);
    if (!scenario_->fields.has(config_.pa.designated_exit))
      throw ConfigError("designated exit missing from plan");
    if (!plan.has_exit(config_.pa.blocked_exit))
      throw ConfigError("blocked exit " + std::to_string(config_.pa.blocked_exit) + " missing from plan");
    for (Coord c : plan.walkable_cells()) {
      if (!scenario_->fields[config_.pa.designated_exit].reachable(c)) {
        throw ConfigError("designated exit " + std::to_string(config_.pa.designated_exit) +
                          " is unreachable from (" + std::to_string(c.x) + ", " +
                          std::to_string(c.y) + ")");
      }
    }
  }

  void init(std::vector<Agent> agents) {
    const FloorPlan& plan = scenario_->plan;
    signs_ = place_signs(plan, config_.s, scenario_->layout);
    for (Sign& s : signs_) {
      s.visibility_radius = config_.visibility_radius;
      sensing_.emplace_back(plan, s.pos, config_.controller.sensing_radius);
    }
    visible_ = Grid<std::vector<VisibleSign>>(plan.width(), plan.height());
    for (Coord c : plan.walkable_cells()) visible_[c] = perceive_signs(c, signs_);

    agents_ = std::move(agents);
    occupancy_ = Grid<int>(plan.width(), plan.height(), 0);
    occupants_ = Grid<std::vector<int>>(plan.width(), plan.height());
    for (const Agent& a : agents_) {
      ++occupancy_[a.pos];
      occupants_[a.pos].push_back(a.id);
    }
    moved_at_.assign(agents_.size(), -1);
    active_.resize(agents_.size());
    std::iota(active_.begin(), active_.end(), 0);

    metrics_.n = config_.n;
    metrics_.config_echo = render_config(config_);
    metrics_.records.push_back({0, 0, config_.n == 0 ? 1.0 : 0.0});
  }

  void fire_pa(int k) {
    receive_pa(agents_, config_.pa, scenario_->plan, scenario_->fields, blocked_);
    pa_fired_ = true;
    if (config_.controller.mode == DisplayMode::Off) return;
    activate_default(signs_, scenario_->fields, blocked_);
    for (std::size_t i = 0; i < signs_.size(); ++i) {
      metrics_.sign_changes.push_back(
          {k, signs_[i].id, 0, *signs_[i].displayed_exit, sensing_[i].density(occupancy_)});
    }
  }

  void decide() {
    if (signs_.empty() || config_.controller.mode == DisplayMode::Off) return;
    for (int i : active_) {
      Agent& a = agents_[i];
      decide_target(a, visible_[a.pos], signs_);
    }
  }

  bool should_evacuate(const Agent& a) const {
    const Cell& cell = scenario_->plan.at(a.pos);
    if (cell.kind != CellKind::Exit) return false;
    if (config_.evacuate_any_exit) return !blocked_.contains(cell.exit_id);
    return a.target == cell.exit_id;
  }

  void move(int k) {
    rng_.shuffle(std::span<int>(active_));
    const int cap = config_.cell_capacity;
    const FloorPlan& plan = scenario_->plan;
    for (int i : active_) {
      if (moved_at_[i] == k) continue;
      Agent& a = agents_[i];
      const Coord dest = plan_move(a, plan, scenario_->fields);
      if (dest == a.pos) continue;
      if (occupancy_[dest] < cap) {
        relocate(i, dest);
        moved_at_[i] = k;
        continue;
      }
      Coord alt = a.pos;
      if (config_.sidestep) {
        // Preferred cell full: take the other distance-decreasing neighbor.
        alt = alternate_move(a, dest);
        if (alt != a.pos && occupancy_[alt] < cap) {
          relocate(i, alt);
          moved_at_[i] = k;
          continue;
        }
      }
      if (!config_.allow_swap) continue;
      // Both cells full: trade places with an occupant that has not moved yet
      // and gets closer to its own exit by taking this agent's cell. Cell
      // counts are unchanged.
      const Coord from = a.pos;
      for (Coord want : {dest, alt}) {
        if (want == from) continue;
        const auto& there = occupants_[want];
        auto j = std::find_if(there.begin(), there.end(), [&](int o) {
          return moved_at_[o] != k && closer(agents_[o], from);
        });
        if (j == there.end()) continue;
        const int partner = *j;
        relocate(i, want);
        relocate(partner, from);
        moved_at_[i] = k;
        moved_at_[partner] = k;
        break;
      }
    }
    std::erase_if(active_, [&](int i) {
      Agent& a = agents_[i];
      if (!should_evacuate(a)) return false;
      a.evacuated_at = k + 1;
      remove_occupant(i);
      ++evacuated_;
      return true;
    });
  }

  Coord alternate_move(const Agent& a, Coord preferred) const {
    const DistanceField& field = scenario_->fields[*a.target];
    const int here = field.at(a.pos);
    for (Coord off : kNeighborOffsets) {
      const Coord nb = a.pos + off;
      if (nb != preferred && scenario_->plan.walkable(nb) && field.at(nb) < here) return nb;
    }
    return a.pos;
  }

  // `c` is adjacent to the agent and nearer its target exit.
  bool closer(const Agent& a, Coord c) const {
    if (!a.target) return false;
    const DistanceField& field = scenario_->fields[*a.target];
    return field.reachable(c) && field.at(c) < field.at(a.pos);
  }

  void remove_occupant(int i) {
    auto& list = occupants_[agents_[i].pos];
    list.erase(std::find(list.begin(), list.end(), i));
    --occupancy_[agents_[i].pos];
  }

  void relocate(int i, Coord dest) {
    remove_occupant(i);
    agents_[i].pos = dest;
    occupants_[dest].push_back(i);
    ++occupancy_[dest];
  }

  void control(int k) {
    const ControllerConfig& cfg = config_.controller;
    std::vector<double> readings(signs_.size());
    std::vector<std::uint8_t> congested(signs_.size());
    for (std::size_t i = 0; i < signs_.size(); ++i) {
      readings[i] = sensing_[i].density(occupancy_);
      record_density(signs_[i], readings[i], cfg.window);
      congested[i] = cfg.policy == Policy::P1 ? p1_congested(cfg, readings[i])
                                              : p2_congested(cfg, signs_[i]);
    }
    const ExitSet congested_set = congested_exits(signs_, congested);
    for (std::size_t i = 0; i < signs_.size(); ++i) {
      Sign& s = signs_[i];
      const ExitId before = s.displayed_exit.value_or(0);
      const bool changed =
          cfg.policy == Policy::P1
              ? controller_tick_p1(s, {s.id, k, readings[i]}, cfg, scenario_->fields, congested_set, blocked_)
              : controller_tick_p2(s, cfg, scenario_->fields, congested_set, blocked_);
      if (changed) {
        metrics_.sign_changes.push_back({k + 1, s.id, before, *s.displayed_exit, readings[i]});
      }
    }
  }

  std::shared_ptr<const Scenario> scenario_;
  SimConfig config_;
  Rng rng_;
  std::vector<Agent> agents_;
  std::vector<int> active_;  // indices of agents still inside
  std::vector<Sign> signs_;
  std::vector<SensingArea> sensing_;
  Grid<std::vector<VisibleSign>> visible_;
  Grid<int> occupancy_;
  Grid<std::vector<int>> occupants_;  // agent indices per cell
  std::vector<int> moved_at_;         // last step in which each agent moved
  ExitSet blocked_;
  bool pa_fired_ = false;
  int step_ = 0;
  int evacuated_ = 0;
  MetricsSeries metrics_;
};

inline MetricsSeries run(const SimConfig& config, std::shared_ptr<const Scenario> scenario) {
  Simulation sim(std::move(scenario), config);
  sim.run_to_end();
  return sim.take_metrics();
}

// --- CSV output ---------------------------------------------------------------

inline std::string metrics_csv(const MetricsSeries& m) {
  std::string out = "step,evacuated,rate\n";
  char buf[64];
  for (const StepRecord& r : m.records) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f\n", r.step, r.evacuated, r.rate);
    out += buf;
  }
  return out;
}

inline std::string sign_log_csv(const MetricsSeries& m) {
  std::string out = "step,sign_id,old_exit,new_exit,density\n";
  char buf[96];
  for (const SignChange& c : m.sign_changes) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.6f\n", c.step, c.sign_id, c.old_exit, c.new_exit,
                  c.density);
    out += buf;
  }
  return out;
}

}  // namespace cceg
