#pragma once
// Loading maps and sign layouts: "default" selects the built-in mall and layout,
// anything else is a file path.

#include <array>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cceg/engine.hpp"
#include "cceg/errors.hpp"
#include "cceg/synthetic_mall.hpp"

namespace cceg {

inline constexpr std::uint64_t kDefaultMallSeed = 0;

// Sign positions on the default mall. Signs hang over the main walkways:
// concourse first, then the aisle crossings north and south of it. Any prefix
// of length 4 or 6 is itself a usable layout.
inline constexpr std::array<Coord, 8> kDefaultLayout{{
    {20, 30},  // concourse, west
    {84, 30},  // concourse, east (approach to exit 7)
    {52, 12},  // north aisle, centre
    {52, 46},  // south aisle, centre
    {36, 30},  // concourse, west-centre
    {68, 30},  // concourse, east-centre
    {20, 12},  // north aisle, west
    {84, 46},  // south aisle, east
}};

inline std::vector<Coord> default_layout() { return {kDefaultLayout.begin(), kDefaultLayout.end()}; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("error writing " + path.string());
}

inline FloorPlan load_map(const std::string& source) {
  if (source == "default") return generate_synthetic_mall(kDefaultMallSeed);
  return parse_map(read_file(source));
}

inline std::vector<Coord> load_layout(const std::string& source) {
  if (source == "default") return default_layout();
  return parse_layout(read_file(source));
}

// Plan, fields and layout for a config; every exit must be reachable from every
// walkable cell.
inline std::shared_ptr<const Scenario> load_scenario(const std::string& map, const std::string& layout) {
  auto scenario = std::make_shared<const Scenario>(load_map(map), load_layout(layout));
  if (auto bad = first_unreachable_exit(scenario->plan, scenario->fields)) {
    throw ConfigError("map " + map + ": exit " + std::to_string(*bad) +
                      " is unreachable from some walkable cell");
  }
  return scenario;
}

}  // namespace cceg
