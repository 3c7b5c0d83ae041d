#pragma once
// Promotional signs repurposed as exit guidance: placement, density sensing and
// the display controller (static default mode, congestion policies 1 and 2).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cceg/agent.hpp"
#include "cceg/distance_field.hpp"

namespace cceg {

inline constexpr double kSignRadius = 10.0;  // meters

enum class DisplayMode {
  Off,         // signs keep promotional content for the whole run
  Default,     // nearest exit from PA time onward, never changes
  Congestion,  // nearest exit, redirected while the sign senses crowding
};

enum class Policy {
  P1,  // density above a threshold
  P2,  // density growth above a threshold
};

struct ControllerConfig {
  DisplayMode mode = DisplayMode::Default;
  Policy policy = Policy::P1;
  double theta = 1.5;   // persons/m^2, policy 1
  double delta = 0.05;  // persons/m^2 per step, policy 2
  int window = 10;      // readings per slope estimate, policy 2
  double sensing_radius = kSignRadius;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

inline void validate(const ControllerConfig& cfg) {
  if (!(cfg.theta > 0)) throw ConfigError("theta must be > 0");
  if (!(cfg.delta > 0)) throw ConfigError("delta must be > 0");
  if (cfg.window < 2) throw ConfigError("window must be >= 2");
  if (!(cfg.sensing_radius > 0)) throw ConfigError("sensing_radius must be > 0");
}

struct DensityReading {
  int sign_id = 0;
  int step = 0;
  double value = 0.0;  // persons per walkable m^2 inside the sensing disc
};

struct Sign {
  int id = 0;
  Coord pos;
  double visibility_radius = kSignRadius;
  std::optional<ExitId> displayed_exit;  // nullopt while promotional (inactive)
  ExitId nearest_exit = 0;               // fixed once the PA has fired
  std::deque<double> density_history;    // newest at the back, at most `window`

  bool active() const { return displayed_exit.has_value(); }
};

// --- layouts ---------------------------------------------------------------

// Plain-text layout: one "x y" pair per line (0-based column and row), '#'
// starts a comment.
inline std::vector<Coord> parse_layout(std::string_view text) {
  std::vector<Coord> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Coord c;
    char extra = 0;
    if (std::sscanf(line.c_str(), "%d %d %c", &c.x, &c.y, &extra) != 2) {
      throw ConfigError("sign layout line " + std::to_string(line_no) +
                        ": expected two integers \"x y\"");
    }
    out.push_back(c);
    if (end == text.size()) break;
  }
  return out;
}

inline std::string render_layout(std::span<const Coord> layout) {
  std::string out;
  for (Coord c : layout) out += std::to_string(c.x) + ' ' + std::to_string(c.y) + '\n';
  return out;
}

// The first `s` layout positions become signs 1..s, inactive until the PA.
inline std::vector<Sign> place_signs(const FloorPlan& plan, int s, std::span<const Coord> layout) {
  if (s < 0) throw ConfigError("sign count must be non-negative");
  if (static_cast<std::size_t>(s) > layout.size()) {
    throw ConfigError("sign count " + std::to_string(s) + " exceeds layout capacity " +
                      std::to_string(layout.size()));
  }
  std::vector<Sign> signs;
  for (int i = 0; i < s; ++i) {
    const Coord c = layout[i];
    const std::string where = "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
    if (!plan.in_bounds(c)) throw ConfigError("sign " + std::to_string(i + 1) + " off plan at " + where);
    if (!plan.walkable(c)) throw ConfigError("sign " + std::to_string(i + 1) + " on a wall at " + where);
    for (const Sign& other : signs) {
      if (other.pos == c) throw ConfigError("duplicate sign position " + where);
    }
    Sign sign;
    sign.id = i + 1;
    sign.pos = c;
    signs.push_back(std::move(sign));
  }
  return signs;
}

// --- sensing -----------------------------------------------------------------

// Walkable cells within the sensing radius of a sign, precomputed once.
class SensingArea {
 public:
  SensingArea() = default;
  SensingArea(const FloorPlan& plan, Coord center, double radius) {
    const int r = static_cast<int>(std::ceil(radius));
    const double r2 = radius * radius;
    for (int y = center.y - r; y <= center.y + r; ++y) {
      for (int x = center.x - r; x <= center.x + r; ++x) {
        const Coord c{x, y};
        if (plan.walkable(c) && squared_distance(c, center) <= r2) cells_.push_back(c);
      }
    }
  }

  std::span<const Coord> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }

  // Mean occupancy over the area.
  double density(const Grid<int>& occupancy) const {
    if (cells_.empty()) return 0.0;
    long total = 0;
    for (Coord c : cells_) total += occupancy[c];
    return static_cast<double>(total) / static_cast<double>(cells_.size());
  }

 private:
  std::vector<Coord> cells_;
};

// Agents still inside and within `sensing_radius` of the sign, per walkable cell
// within the same radius.
inline DensityReading measure_density(const FloorPlan& plan, std::span<const Agent> agents,
                                      const Sign& sign, double sensing_radius, int step = 0) {
  const SensingArea area(plan, sign.pos, sensing_radius);
  const double r2 = sensing_radius * sensing_radius;
  long count = 0;
  for (const Agent& a : agents) {
    if (!a.evacuated() && squared_distance(a.pos, sign.pos) <= r2) ++count;
  }
  const double value = area.size() == 0 ? 0.0 : static_cast<double>(count) / area.size();
  return {sign.id, step, value};
}

// --- display controller -----------------------------------------------------

// At PA time every sign switches to its nearest non-blocked exit.
inline void activate_default(std::span<Sign> signs, const ExitFields& fields,
                             const ExitSet& blocked) {
  for (Sign& s : signs) {
    s.nearest_exit = nearest_exit(fields, s.pos, blocked);
    s.displayed_exit = s.nearest_exit;
  }
}

// Exits that some congested sign is nearest to.
inline ExitSet congested_exits(std::span<const Sign> signs, std::span<const std::uint8_t> congested) {
  ExitSet out;
  for (std::size_t i = 0; i < signs.size(); ++i)
    if (congested[i]) out.insert(signs[i].nearest_exit);
  return out;
}

// Nearest reachable, non-blocked exit from the sign that no congested sign is
// nearest to; plain nearest exit if that leaves nothing. Ties by smallest id.
inline ExitId select_redirect_exit(const ExitFields& fields, const Sign& sign,
                                   const ExitSet& congested, const ExitSet& blocked) {
  ExitId best = 0;
  int best_dist = DistanceField::kUnreachable;
  for (ExitId id : fields.exit_ids()) {
    if (blocked.contains(id) || congested.contains(id) || !fields[id].reachable(sign.pos))
      continue;
    const int d = fields[id].at(sign.pos);
    if (d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  return best != 0 ? best : nearest_exit(fields, sign.pos, blocked);
}

inline bool p1_congested(const ControllerConfig& cfg, double reading) { return reading > cfg.theta; }

// Mean per-step change over the full window, if the window is full.
inline std::optional<double> density_slope(const Sign& sign, int window) {
  if (static_cast<int>(sign.density_history.size()) < window) return std::nullopt;
  return (sign.density_history.back() - sign.density_history.front()) / (window - 1);
}

inline bool p2_congested(const ControllerConfig& cfg, const Sign& sign) {
  const auto g = density_slope(sign, cfg.window);
  return g && *g > cfg.delta;
}

inline void record_density(Sign& sign, double value, int window) {
  sign.density_history.push_back(value);
  while (static_cast<int>(sign.density_history.size()) > window) sign.density_history.pop_front();
}

// Policy 1. Above theta a sign showing its nearest exit redirects; at or below
// theta it shows the nearest exit again. Returns whether the display changed.
inline bool controller_tick_p1(Sign& sign, const DensityReading& reading,
                               const ControllerConfig& cfg, const ExitFields& fields,
                               const ExitSet& congested, const ExitSet& blocked) {
  const std::optional<ExitId> before = sign.displayed_exit;
  if (p1_congested(cfg, reading.value)) {
    if (sign.displayed_exit == sign.nearest_exit)
      sign.displayed_exit = select_redirect_exit(fields, sign, congested, blocked);
  } else {
    sign.displayed_exit = sign.nearest_exit;
  }
  return sign.displayed_exit != before;
}

// Policy 2. Uses the slope over the last `window` readings: above delta
// redirect, non-positive revert to the nearest exit, otherwise hold.
inline bool controller_tick_p2(Sign& sign, const ControllerConfig& cfg, const ExitFields& fields,
                               const ExitSet& congested, const ExitSet& blocked) {
  const auto g = density_slope(sign, cfg.window);
  if (!g) return false;
  const std::optional<ExitId> before = sign.displayed_exit;
  if (*g > cfg.delta) {
    sign.displayed_exit = select_redirect_exit(fields, sign, congested, blocked);
  } else if (*g <= 0.0) {
    sign.displayed_exit = sign.nearest_exit;
  }
  return sign.displayed_exit != before;
}

}  // namespace cceg
