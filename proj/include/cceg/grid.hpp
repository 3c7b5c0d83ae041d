#pragma once
// Dense 2D grid storage and cell coordinates shared by every module.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace cceg {

struct Coord {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(const Coord&, const Coord&) = default;
  // Row-major order (y first) so sorted coordinate lists read like the map file.
  friend constexpr auto operator<=>(const Coord& a, const Coord& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

// Fixed neighbor order used for every tie-break: north, east, south, west.
// North is toward row 0.
inline constexpr std::array<Coord, 4> kNeighborOffsets{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

constexpr Coord operator+(Coord a, Coord b) { return {a.x + b.x, a.y + b.y}; }

inline constexpr double squared_distance(Coord a, Coord b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, const T& fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }

  bool in_bounds(Coord c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  std::size_t index(Coord c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Coord coord(std::size_t i) const {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }

  T& operator[](Coord c) { return data_[index(c)]; }
  const T& operator[](Coord c) const { return data_[index(c)]; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace cceg
