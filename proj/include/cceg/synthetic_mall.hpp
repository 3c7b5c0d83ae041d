#pragma once
// Seeded generator for a synthetic underground mall: an open sales floor with
// shop islands, an east-west concourse and fourteen single-cell exits on the
// outer boundary, twelve of them at the top of two-cell-wide stairways.
//
// Exit numbering runs clockwise: 1..6 along the north edge (west to east), 7 at
// the east end of the concourse, 8..13 along the south edge (east to west) and
// 14 at the west end of the concourse.
//
// The walkable area (exit cells included) is always exactly kMallWalkableCells.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cceg/floor_plan.hpp"
#include "cceg/rng.hpp"

namespace cceg {

inline constexpr int kMallWidth = 104;
inline constexpr int kMallHeight = 60;
inline constexpr std::size_t kMallWalkableCells = 4000;
inline constexpr int kMallExitCount = 14;

namespace detail {

struct Rect {
  int x0, y0, x1, y1;  // inclusive
};

inline void carve(Grid<Cell>& g, const Rect& r) {
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) g[{x, y}] = Cell{CellKind::Walkable, 0};
}

inline int jitter(Rng& rng, int span) {
  return static_cast<int>(rng.below(2 * span + 1)) - span;
}

inline std::size_t count_open(const Grid<Cell>& g) {
  return static_cast<std::size_t>(
      std::count_if(g.begin(), g.end(), [](const Cell& c) { return c.kind != CellKind::Wall; }));
}

}  // namespace detail

inline FloorPlan generate_synthetic_mall(std::uint64_t seed) {
  using detail::Rect;
  constexpr int W = kMallWidth;
  constexpr int H = kMallHeight;
  Rng rng(seed);
  Grid<Cell> g(W, H);

  // Open sales floor with a full-width concourse reaching the east and west
  // walls; shop islands (walls) split the floor into aisles north and south of
  // the concourse.
  constexpr int kFloorTop = 8, kFloorBottom = 51;
  constexpr int kConcourseTop = 26, kConcourseBottom = 35;
  detail::carve(g, {4, kFloorTop, W - 5, kFloorBottom});
  detail::carve(g, {1, kConcourseTop, W - 2, kConcourseBottom});

  const int lanes[] = {4, 28, 52, 76};  // four 24-cell lanes
  for (int band_top : {15, 38}) {
    for (int lane : lanes) {
      const int w = 12 + detail::jitter(rng, 1);
      const int x0 = lane + 6 + detail::jitter(rng, 2);
      const int y0 = band_top + detail::jitter(rng, 1);
      for (int y = y0; y < y0 + 6; ++y)
        for (int x = x0; x < x0 + w; ++x) g[{x, y}] = Cell{};
    }
  }

  // Stair stubs to the surface: two cells wide, exit cell in the boundary row.
  const int stub_x[] = {13, 28, 44, 58, 74, 88};
  std::vector<std::pair<Coord, ExitId>> exit_cells;
  for (int i = 0; i < 6; ++i) {
    const int x = stub_x[i] + detail::jitter(rng, 1);
    detail::carve(g, {x, 1, x + 1, kFloorTop - 1});
    exit_cells.push_back({{x, 0}, 1 + i});
  }
  exit_cells.push_back({{W - 1, 29}, 7});
  for (int i = 0; i < 6; ++i) {
    const int x = stub_x[5 - i] + detail::jitter(rng, 1);
    detail::carve(g, {x, kFloorBottom + 1, x + 1, H - 2});
    exit_cells.push_back({{x, H - 1}, 8 + i});
  }
  exit_cells.push_back({{0, 29}, 14});
  for (const auto& [c, id] : exit_cells) g[c] = Cell{CellKind::Exit, id};

  // Grow the walkable area one cell at a time until the target is hit,
  // preferring wall cells with the most walkable neighbors so halls fill out
  // into compact shapes. Boundary cells stay walls so exits remain the only
  // openings.
  std::size_t open = detail::count_open(g);
  while (open < kMallWalkableCells) {
    std::vector<Coord> frontier;
    int best = 1;
    for (int y = 2; y < H - 2; ++y) {
      for (int x = 2; x < W - 2; ++x) {
        const Coord c{x, y};
        if (g[c].kind != CellKind::Wall) continue;
        int open_nb = 0;
        for (Coord off : kNeighborOffsets) open_nb += g[c + off].kind == CellKind::Walkable;
        if (open_nb > best) {
          best = open_nb;
          frontier.clear();
        }
        if (open_nb == best) frontier.push_back(c);
      }
    }
    const Coord pick = frontier[rng.below(frontier.size())];
    g[pick] = Cell{CellKind::Walkable, 0};
    ++open;
  }
  return FloorPlan(std::move(g));
}

}  // namespace cceg
