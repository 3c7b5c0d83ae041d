#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cceg/population.hpp"
#include "cceg/scenario.hpp"
#include "cceg/signage.hpp"
#include "oracle/bfs_oracle.hpp"

using namespace cceg;

namespace {

const FloorPlan& mall() {
  static const FloorPlan plan = generate_synthetic_mall(0);
  return plan;
}

const ExitFields& mall_fields() {
  static const ExitFields fields(mall());
  return fields;
}

Sign sign_showing(ExitId nearest, std::optional<ExitId> shown, Coord pos = {0, 0}) {
  Sign s;
  s.id = 1;
  s.pos = pos;
  s.nearest_exit = nearest;
  s.displayed_exit = shown;
  return s;
}

ControllerConfig p2_config(double delta, int window) {
  ControllerConfig cfg;
  cfg.mode = DisplayMode::Congestion;
  cfg.policy = Policy::P2;
  cfg.delta = delta;
  cfg.window = window;
  return cfg;
}

oracle::Map oracle_map(const FloorPlan& plan) {
  oracle::Map m;
  const std::string text = render_map(plan);
  for (std::size_t s = 0; s < text.size();) {
    const std::size_t e = text.find('\n', s);
    m.rows.push_back(text.substr(s, e - s));
    s = e + 1;
  }
  return m;
}

}  // namespace

TEST(PlaceSigns, NoSigns) { EXPECT_TRUE(place_signs(mall(), 0, default_layout()).empty()); }

TEST(PlaceSigns, FullLayoutNumbersSignsFromOne) {
  const auto signs = place_signs(mall(), 8, default_layout());
  ASSERT_EQ(signs.size(), 8u);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(signs[i].id, i + 1);
    EXPECT_EQ(signs[i].pos, default_layout()[i]);
    EXPECT_FALSE(signs[i].active());
  }
}

TEST(PlaceSigns, SmallerCountsArePrefixes) {
  const auto eight = place_signs(mall(), 8, default_layout());
  for (int s : {4, 6}) {
    const auto fewer = place_signs(mall(), s, default_layout());
    ASSERT_EQ(fewer.size(), static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) EXPECT_EQ(fewer[i].pos, eight[i].pos);
  }
}

TEST(PlaceSigns, Errors) {
  const FloorPlan plan = parse_map("1...#\n");
  const std::vector<Coord> off{{9, 0}}, wall{{4, 0}}, dup{{1, 0}, {1, 0}};
  EXPECT_THROW(place_signs(plan, 1, off), ConfigError);
  EXPECT_THROW(place_signs(plan, 1, wall), ConfigError);
  EXPECT_THROW(place_signs(plan, 2, dup), ConfigError);
  EXPECT_THROW(place_signs(plan, 2, off), ConfigError);  // longer than the layout
}

TEST(Layout, ParseAndRender) {
  const auto layout = parse_layout("# comment\n3 4\n\n 5 6 # trailing\n");
  ASSERT_EQ(layout.size(), 2u);
  EXPECT_EQ(layout[1], (Coord{5, 6}));
  EXPECT_EQ(parse_layout(render_layout(layout)), layout);
  EXPECT_THROW(parse_layout("3\n"), ConfigError);
  EXPECT_THROW(parse_layout("3 4 5\n"), ConfigError);
}

TEST(MeasureDensity, EmptyDiscReadsZero) {
  const auto signs = place_signs(mall(), 1, default_layout());
  EXPECT_EQ(measure_density(mall(), {}, signs[0], 10.0).value, 0.0);
}

TEST(MeasureDensity, ThirtyAgentsOverThreeHundredCells) {
  // 21x21 open room; the disc of radius 10 around the centre covers 317
  // cells. Walling up 17 of them, (2..18, 11), leaves exactly 300.
  std::vector<std::string> rows(21, std::string(21, '.'));
  rows[0][0] = '1';
  for (int x = 2; x <= 18; ++x) rows[11][x] = '#';
  std::string text;
  for (auto& r : rows) text += r + "\n";
  const FloorPlan plan = parse_map(text);
  Sign sign;
  sign.pos = {10, 10};
  int cells = 0;
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x)
      cells += rows[y][x] != '#' && (x - 10) * (x - 10) + (y - 10) * (y - 10) <= 100;
  ASSERT_EQ(cells, 300);
  std::vector<Agent> agents;
  for (int i = 0; i < 30; ++i) agents.push_back(Agent{i, {10 + i % 5, 5 + i / 10}, true, {}, {}});
  agents.push_back(Agent{30, {0, 20}, true, {}, {}});      // outside the disc
  agents.push_back(Agent{31, {10, 10}, true, {}, 3});      // evacuated
  EXPECT_DOUBLE_EQ(measure_density(plan, agents, sign, 10.0).value, 0.1);
}

TEST(MeasureDensity, MatchesDoubleLoopOnRandomPlacements) {
  std::mt19937_64 gen(3);
  const auto signs = place_signs(mall(), 8, default_layout());
  const auto& cells = mall().walkable_cells();
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Agent> agents;
    for (int i = 0; i < 2000; ++i) agents.push_back(Agent{i, cells[gen() % cells.size()], true, {}, {}});
    Grid<int> occ(mall().width(), mall().height(), 0);
    for (const Agent& a : agents) ++occ[a.pos];
    for (const Sign& s : signs) {
      int in_disc = 0, area = 0;
      for (int y = 0; y < mall().height(); ++y)
        for (int x = 0; x < mall().width(); ++x) {
          const int dx = x - s.pos.x, dy = y - s.pos.y;
          if (dx * dx + dy * dy > 100) continue;
          if (mall().walkable({x, y})) ++area;
        }
      for (const Agent& a : agents) {
        const int dx = a.pos.x - s.pos.x, dy = a.pos.y - s.pos.y;
        in_disc += dx * dx + dy * dy <= 100;
      }
      const double want = static_cast<double>(in_disc) / area;
      EXPECT_DOUBLE_EQ(measure_density(mall(), agents, s, 10.0).value, want);
      EXPECT_DOUBLE_EQ(SensingArea(mall(), s.pos, 10.0).density(occ), want);
    }
  }
}

TEST(MeasureDensity, UniformSpawnReadsAboutOne) {
  Rng rng(0);
  const auto agents = spawn_agents(mall(), 4000, 0.5, rng);
  for (const Sign& s : place_signs(mall(), 8, default_layout()))
    EXPECT_NEAR(measure_density(mall(), agents, s, 10.0).value, 1.0, 0.25) << "sign " << s.id;
}

TEST(ActivateDefault, AdjacentExitIsShown) {
  const FloorPlan plan = parse_map("#3#\n#.#\n#.#\n#1#\n");
  const ExitFields fields(plan);
  std::vector<Coord> layout{{1, 1}};
  auto signs = place_signs(plan, 1, layout);
  activate_default(signs, fields, {});
  EXPECT_EQ(signs[0].displayed_exit, 3);
}

TEST(ActivateDefault, BlockedNearestFallsToSecond) {
  const FloorPlan plan = parse_map("#3#\n#.#\n#.#\n#.#\n#1#\n");
  const ExitFields fields(plan);
  std::vector<Coord> layout{{1, 3}};
  auto signs = place_signs(plan, 1, layout);
  activate_default(signs, fields, {1});
  EXPECT_EQ(signs[0].displayed_exit, 3);
}

TEST(ActivateDefault, FrozenLayoutShowsOracleNearestExits) {
  // Nearest non-blocked exits of the eight default signs with exit 1 blocked,
  // from the relaxation oracle. Sign 6 is 36 hops from both 5 and 7.
  const ExitId want[] = {14, 7, 4, 10, 14, 5, 2, 8};
  auto signs = place_signs(mall(), 8, default_layout());
  activate_default(signs, mall_fields(), {1});
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(signs[i].displayed_exit, want[i]) << "sign " << i + 1;
    EXPECT_EQ(signs[i].nearest_exit, want[i]);
  }
}

TEST(ControllerP1, AboveThresholdRedirects) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 1, {2, 0});
  ControllerConfig cfg;
  cfg.theta = 1.5;
  EXPECT_TRUE(controller_tick_p1(s, {1, 0, 2.0}, cfg, fields, {1}, {}));
  EXPECT_EQ(s.displayed_exit, 2);
}

TEST(ControllerP1, ThresholdItselfDoesNotTrigger) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 1, {2, 0});
  ControllerConfig cfg;
  cfg.theta = 1.5;
  EXPECT_FALSE(controller_tick_p1(s, {1, 0, 1.5}, cfg, fields, {}, {}));
  EXPECT_EQ(s.displayed_exit, 1);
}

TEST(ControllerP1, RevertsWhenCongestionClears) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 2, {2, 0});
  ControllerConfig cfg;
  EXPECT_TRUE(controller_tick_p1(s, {1, 0, 0.0}, cfg, fields, {}, {}));
  EXPECT_EQ(s.displayed_exit, 1);
}

TEST(ControllerP1, StaysRedirectedWhileCongested) {
  const FloorPlan plan = parse_map("1.....2.3\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 2, {2, 0});
  ControllerConfig cfg;
  EXPECT_FALSE(controller_tick_p1(s, {1, 0, 3.0}, cfg, fields, {1}, {}));
  EXPECT_EQ(s.displayed_exit, 2);
}

TEST(ControllerP2, RisingDensityRedirects) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 1, {2, 0});
  const auto cfg = p2_config(0.2, 3);
  for (double v : {0.5, 0.8, 1.2}) record_density(s, v, cfg.window);
  EXPECT_NEAR(*density_slope(s, 3), 0.35, 1e-12);
  EXPECT_TRUE(p2_congested(cfg, s));
  EXPECT_TRUE(controller_tick_p2(s, cfg, fields, {1}, {}));
  EXPECT_EQ(s.displayed_exit, 2);
}

TEST(ControllerP2, FlatDensityShowsNearest) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 2, {2, 0});
  const auto cfg = p2_config(0.2, 3);
  for (double v : {1.0, 1.0, 1.0}) record_density(s, v, cfg.window);
  EXPECT_TRUE(controller_tick_p2(s, cfg, fields, {}, {}));
  EXPECT_EQ(s.displayed_exit, 1);
}

TEST(ControllerP2, ShortHistoryDoesNothing) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 1, {2, 0});
  const auto cfg = p2_config(0.2, 3);
  for (double v : {0.0, 5.0}) record_density(s, v, cfg.window);
  EXPECT_FALSE(density_slope(s, 3));
  EXPECT_FALSE(controller_tick_p2(s, cfg, fields, {1}, {}));
  EXPECT_EQ(s.displayed_exit, 1);
}

TEST(ControllerP2, ModestRiseHolds) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  Sign s = sign_showing(1, 2, {2, 0});
  const auto cfg = p2_config(0.2, 3);
  for (double v : {1.0, 1.1, 1.2}) record_density(s, v, cfg.window);
  EXPECT_FALSE(controller_tick_p2(s, cfg, fields, {}, {}));
  EXPECT_EQ(s.displayed_exit, 2);
}

TEST(ControllerP2, HistoryKeepsOnlyWindow) {
  Sign s;
  for (int i = 0; i < 25; ++i) record_density(s, i, 10);
  ASSERT_EQ(s.density_history.size(), 10u);
  EXPECT_EQ(s.density_history.front(), 15);
  EXPECT_DOUBLE_EQ(*density_slope(s, 10), 1.0);
}

TEST(RedirectExit, SingleOpenExitIsReturnedEvenIfCongested) {
  const FloorPlan plan = parse_map("1.....2\n");
  const ExitFields fields(plan);
  const Sign s = sign_showing(2, 2, {4, 0});
  EXPECT_EQ(select_redirect_exit(fields, s, {2}, {1}), 2);
}

TEST(RedirectExit, SkipsCongestedNearest) {
  // From the sign at x=6: exit 7 at 1 hop, exit 4 at 3, exit 9 at 6.
  const FloorPlan plan = parse_map("9..4...7\n");
  const ExitFields fields(plan);
  const Sign s = sign_showing(7, 7, {6, 0});
  EXPECT_EQ(select_redirect_exit(fields, s, {}, {}), 7);
  EXPECT_EQ(select_redirect_exit(fields, s, {7}, {}), 4);
  EXPECT_EQ(select_redirect_exit(fields, s, {7, 4}, {}), 9);
  EXPECT_EQ(select_redirect_exit(fields, s, {7, 4, 9}, {}), 7);  // nothing left: plain nearest
  EXPECT_EQ(select_redirect_exit(fields, s, {7}, {4}), 9);
}

TEST(RedirectExit, MatchesRuleOracleOnFrozenMap) {
  const oracle::Map m = oracle_map(mall());
  std::vector<std::vector<std::vector<int>>> dist(15);
  for (int id = 1; id <= 14; ++id) {
    const Coord c = *mall().find_exit(id);
    dist[id] = oracle::distances(m, c.x, c.y);
  }
  auto signs = place_signs(mall(), 8, default_layout());
  activate_default(signs, mall_fields(), {1});
  // Congestion injected at the sign in front of exit 7, then at every sign.
  for (int hot = 0; hot <= 8; ++hot) {
    std::vector<std::uint8_t> congested(8, 0);
    if (hot < 8) congested[1] = congested[hot] = 1;
    else congested.assign(8, 1);
    const ExitSet set = congested_exits(signs, congested);
    for (const Sign& s : signs) {
      int best = 0, best_d = oracle::kInf;
      for (int id = 1; id <= 14; ++id) {
        bool skip = id == 1;
        for (int i = 0; i < 8; ++i) skip = skip || (congested[i] && signs[i].nearest_exit == id);
        if (!skip && dist[id][s.pos.y][s.pos.x] < best_d) {
          best = id;
          best_d = dist[id][s.pos.y][s.pos.x];
        }
      }
      if (best == 0) best = s.nearest_exit;
      EXPECT_EQ(select_redirect_exit(mall_fields(), s, set, {1}), best) << "sign " << s.id << " hot " << hot;
    }
  }
}
