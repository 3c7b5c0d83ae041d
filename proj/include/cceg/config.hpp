#pragma once
// Simulation and sweep configuration, and the plain-text `key = value` format
// used for config files and config echoes.
//
// Single-run keys (defaults in brackets; `n` is required):
//   n                   agents
//   p [0.5]             compliance probability
//   s [8]               signs taken from the layout
//   mode [default]      off | default | congestion
//   policy [p1]         p1 | p2 (congestion mode)
//   theta [1.5]         persons/m^2, policy 1 ("inf" disables)
//   delta [0.05]        persons/m^2 per step, policy 2 ("inf" disables)
//   window [10]         readings per slope, policy 2
//   sensing_radius [10] meters
//   visibility_radius [10] meters
//   pa_step [0]         step at which the PA fires
//   pa_blocked [1]      exit reported blocked
//   pa_designated [7]   exit everyone is sent to
//   seed [0]
//   max_steps [2000]
//   cell_capacity [4]   agents per cell after movement
//   evacuate_any_exit [false]
//   allow_swap [true]   opposing agents may trade places between full cells
//   sidestep [true]     a blocked agent may take its other improving neighbor
//   map [default]       "default" or a map file path
//   layout [default]    "default" or a sign layout file path
//
// Sweep files use the same grammar. `n`, `p` and `s` take comma-separated
// lists, `modes` lists variants (off, default, congestion-p1, congestion-p2),
// `seeds` lists integers or inclusive ranges `a..b`, and `out` names the
// output directory. `seeds` (or `modes`) marks a file as a sweep.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <variant>
#include <vector>

#include "cceg/agent.hpp"
#include "cceg/errors.hpp"
#include "cceg/signage.hpp"

namespace cceg {

struct SimConfig {
  int n = 0;
  double p = 0.5;
  int s = 8;
  ControllerConfig controller;
  double visibility_radius = kSignRadius;
  int pa_step = 0;
  PaMessage pa;
  std::uint64_t seed = 0;
  int max_steps = 2000;
  int cell_capacity = 4;
  bool evacuate_any_exit = false;
  bool allow_swap = true;
  bool sidestep = true;
  std::string map = "default";
  std::string layout = "default";

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline void validate(const SimConfig& c) {
  if (c.n < 0) throw ConfigError("n must be >= 0");
  if (!(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("p must be in [0, 1]");
  if (c.s < 0) throw ConfigError("s must be >= 0");
  if (c.cell_capacity < 1) throw ConfigError("cell_capacity must be >= 1");
  if (c.max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (c.pa_step < 0) throw ConfigError("pa_step must be >= 0");
  if (!(c.visibility_radius > 0)) throw ConfigError("visibility_radius must be > 0");
  if (c.pa.blocked_exit == c.pa.designated_exit)
    throw ConfigError("pa_blocked and pa_designated must differ");
  validate(c.controller);
}

// --- scalar formatting --------------------------------------------------------

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string_view mode_name(DisplayMode m) {
  switch (m) {
    case DisplayMode::Off: return "off";
    case DisplayMode::Default: return "default";
    case DisplayMode::Congestion: return "congestion";
  }
  return "?";
}

inline std::string_view policy_name(Policy p) { return p == Policy::P1 ? "p1" : "p2"; }

// Display variant used in sweeps and result labels.
struct Variant {
  DisplayMode mode = DisplayMode::Default;
  Policy policy = Policy::P1;

  friend bool operator==(const Variant&, const Variant&) = default;
  friend auto operator<=>(const Variant&, const Variant&) = default;
};

inline std::string variant_name(Variant v) {
  if (v.mode != DisplayMode::Congestion) return std::string(mode_name(v.mode));
  return "congestion-" + std::string(policy_name(v.policy));
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "off") return Variant{DisplayMode::Off, Policy::P1};
  if (s == "default") return Variant{DisplayMode::Default, Policy::P1};
  if (s == "congestion-p1") return Variant{DisplayMode::Congestion, Policy::P1};
  if (s == "congestion-p2") return Variant{DisplayMode::Congestion, Policy::P2};
  return std::nullopt;
}

inline Variant variant_of(const SimConfig& c) {
  return {c.controller.mode,
          c.controller.mode == DisplayMode::Congestion ? c.controller.policy : Policy::P1};
}

// --- key/value reader ---------------------------------------------------------

struct ConfigEntry {
  std::string value;
  int line = 0;
};

class KeyValues {
 public:
  static KeyValues parse(std::string_view text) {
    KeyValues kv;
    int line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      start = end + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (kv.entries_.count(key)) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key `" + key + "`");
      }
      kv.entries_[key] = {value, line_no};
    }
    return kv;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const ConfigEntry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Rejects keys outside `allowed`.
  void check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, e] : entries_) {
      if (!allowed.count(key)) {
        throw ConfigError("line " + std::to_string(e.line) + ": unknown key `" + key + "`");
      }
    }
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
      s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  }

 private:
  std::map<std::string, ConfigEntry> entries_;
};

namespace detail {

[[noreturn]] inline void bad_value(const std::string& key, const ConfigEntry& e,
                                   const std::string& why) {
  throw ConfigError("line " + std::to_string(e.line) + ": " + key + " = " + e.value + ": " + why);
}

template <class T>
T parse_scalar(const std::string& key, const ConfigEntry& e, std::string_view text) {
  text = KeyValues::trim(text);
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    if (text == "inf" || text == "infinity") return std::numeric_limits<T>::infinity();
  }
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) bad_value(key, e, "not a valid number");
  return v;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(KeyValues::trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool parse_bool(const std::string& key, const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  bad_value(key, e, "expected true or false");
}

inline void require_range(const std::string& key, const ConfigEntry& e, bool ok,
                          const std::string& range) {
  if (!ok) bad_value(key, e, "out of range (" + range + ")");
}

// Scalar keys shared by single-run configs and sweeps.
inline const std::set<std::string>& shared_keys() {
  static const std::set<std::string> keys{
      "theta",   "delta",      "window",    "sensing_radius", "visibility_radius",
      "pa_step", "pa_blocked", "pa_designated", "max_steps",  "cell_capacity",
      "evacuate_any_exit", "allow_swap", "sidestep", "map", "layout"};
  return keys;
}

inline void apply_shared(const KeyValues& kv, SimConfig& c) {
  auto num = [&](const char* key, auto& field, auto check, const char* range) {
    if (const ConfigEntry* e = kv.find(key)) {
      field = parse_scalar<std::decay_t<decltype(field)>>(key, *e, e->value);
      require_range(key, *e, check(field), range);
    }
  };
  num("theta", c.controller.theta, [](double v) { return v > 0; }, "> 0");
  num("delta", c.controller.delta, [](double v) { return v > 0; }, "> 0");
  num("window", c.controller.window, [](int v) { return v >= 2; }, ">= 2");
  num("sensing_radius", c.controller.sensing_radius, [](double v) { return v > 0 && std::isfinite(v); }, "> 0");
  num("visibility_radius", c.visibility_radius, [](double v) { return v > 0 && std::isfinite(v); }, "> 0");
  num("pa_step", c.pa_step, [](int v) { return v >= 0; }, ">= 0");
  num("pa_blocked", c.pa.blocked_exit, [](int v) { return v >= 1 && v <= kMaxExitId; }, "1..14");
  num("pa_designated", c.pa.designated_exit, [](int v) { return v >= 1 && v <= kMaxExitId; }, "1..14");
  num("max_steps", c.max_steps, [](int v) { return v >= 1; }, ">= 1");
  num("cell_capacity", c.cell_capacity, [](int v) { return v >= 1; }, ">= 1");
  if (const ConfigEntry* e = kv.find("evacuate_any_exit"))
    c.evacuate_any_exit = parse_bool("evacuate_any_exit", *e);
  if (const ConfigEntry* e = kv.find("allow_swap")) c.allow_swap = parse_bool("allow_swap", *e);
  if (const ConfigEntry* e = kv.find("sidestep")) c.sidestep = parse_bool("sidestep", *e);
  if (const ConfigEntry* e = kv.find("map")) c.map = e->value;
  if (const ConfigEntry* e = kv.find("layout")) c.layout = e->value;
  if (c.pa.blocked_exit == c.pa.designated_exit) {
    throw ConfigError("pa_blocked and pa_designated must differ (both " +
                      std::to_string(c.pa.blocked_exit) + ")");
  }
}

inline int parse_n(const ConfigEntry& e, std::string_view v) {
  const int n = parse_scalar<int>("n", e, v);
  require_range("n", e, n >= 0, ">= 0");
  return n;
}
inline double parse_p(const ConfigEntry& e, std::string_view v) {
  const double p = parse_scalar<double>("p", e, v);
  require_range("p", e, p >= 0.0 && p <= 1.0, "0..1");
  return p;
}
inline int parse_s(const ConfigEntry& e, std::string_view v) {
  const int s = parse_scalar<int>("s", e, v);
  require_range("s", e, s >= 0, ">= 0");
  return s;
}

}  // namespace detail

inline SimConfig parse_sim_config(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  std::set<std::string> allowed = detail::shared_keys();
  allowed.insert({"n", "p", "s", "mode", "policy", "seed"});
  kv.check_keys(allowed);

  SimConfig c;
  const ConfigEntry* n = kv.find("n");
  if (!n) throw ConfigError("missing required key `n`");
  c.n = detail::parse_n(*n, n->value);
  if (const ConfigEntry* e = kv.find("p")) c.p = detail::parse_p(*e, e->value);
  if (const ConfigEntry* e = kv.find("s")) c.s = detail::parse_s(*e, e->value);
  if (const ConfigEntry* e = kv.find("mode")) {
    if (e->value == "off") c.controller.mode = DisplayMode::Off;
    else if (e->value == "default") c.controller.mode = DisplayMode::Default;
    else if (e->value == "congestion") c.controller.mode = DisplayMode::Congestion;
    else detail::bad_value("mode", *e, "expected off, default or congestion");
  }
  if (const ConfigEntry* e = kv.find("policy")) {
    if (e->value == "p1") c.controller.policy = Policy::P1;
    else if (e->value == "p2") c.controller.policy = Policy::P2;
    else detail::bad_value("policy", *e, "expected p1 or p2");
  }
  if (const ConfigEntry* e = kv.find("seed")) c.seed = detail::parse_scalar<std::uint64_t>("seed", *e, e->value);
  detail::apply_shared(kv, c);
  return c;
}

namespace detail {

inline void render_shared(std::string& out, const SimConfig& c) {
  auto line = [&](std::string_view k, const std::string& v) {
    out.append(k).append(" = ").append(v).append("\n");
  };
  line("theta", format_number(c.controller.theta));
  line("delta", format_number(c.controller.delta));
  line("window", std::to_string(c.controller.window));
  line("sensing_radius", format_number(c.controller.sensing_radius));
  line("visibility_radius", format_number(c.visibility_radius));
  line("pa_step", std::to_string(c.pa_step));
  line("pa_blocked", std::to_string(c.pa.blocked_exit));
  line("pa_designated", std::to_string(c.pa.designated_exit));
  line("max_steps", std::to_string(c.max_steps));
  line("cell_capacity", std::to_string(c.cell_capacity));
  line("evacuate_any_exit", c.evacuate_any_exit ? "true" : "false");
  line("allow_swap", c.allow_swap ? "true" : "false");
  line("sidestep", c.sidestep ? "true" : "false");
  line("map", c.map);
  line("layout", c.layout);
}

}  // namespace detail

// Every key, in a fixed order; parse_sim_config(render_config(c)) == c.
inline std::string render_config(const SimConfig& c) {
  std::string out;
  out += "n = " + std::to_string(c.n) + "\n";
  out += "p = " + format_number(c.p) + "\n";
  out += "s = " + std::to_string(c.s) + "\n";
  out += "mode = " + std::string(mode_name(c.controller.mode)) + "\n";
  out += "policy = " + std::string(policy_name(c.controller.policy)) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  detail::render_shared(out, c);
  return out;
}

// --- sweeps -------------------------------------------------------------------

struct SweepSpec {
  std::vector<int> n;
  std::vector<double> p;
  std::vector<int> s;
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds;
  SimConfig base;  // every other parameter
  std::string out = "results";

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;

  // One config per (n, p, s, variant), sorted in that order, seed left at 0.
  std::vector<SimConfig> expand() const {
    std::vector<SimConfig> out_configs;
    for (int nv : n)
      for (double pv : p)
        for (int sv : s)
          for (Variant v : variants) {
            SimConfig c = base;
            c.n = nv;
            c.p = pv;
            c.s = sv;
            c.controller.mode = v.mode;
            c.controller.policy = v.policy;
            c.seed = 0;
            out_configs.push_back(c);
          }
    std::stable_sort(out_configs.begin(), out_configs.end(), [](const SimConfig& a, const SimConfig& b) {
      return std::tuple(a.n, a.p, a.s, variant_of(a)) < std::tuple(b.n, b.p, b.s, variant_of(b));
    });
    return out_configs;
  }

  std::size_t run_count() const {
    return n.size() * p.size() * s.size() * variants.size() * seeds.size();
  }
};

inline SweepSpec parse_sweep_spec(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  std::set<std::string> allowed = detail::shared_keys();
  allowed.insert({"n", "p", "s", "modes", "seeds", "out"});
  kv.check_keys(allowed);

  SweepSpec spec;
  spec.base = SimConfig{};
  for (const char* required : {"n", "seeds"}) {
    if (!kv.has(required)) throw ConfigError(std::string("missing required key `") + required + "`");
  }
  auto each = [&](const char* key, auto&& fn) {
    const ConfigEntry* e = kv.find(key);
    if (!e) return false;
    for (std::string_view item : detail::split_list(e->value)) {
      if (item.empty()) detail::bad_value(key, *e, "empty list item");
      fn(*e, item);
    }
    return true;
  };
  each("n", [&](const ConfigEntry& e, std::string_view v) { spec.n.push_back(detail::parse_n(e, v)); });
  if (!each("p", [&](const ConfigEntry& e, std::string_view v) { spec.p.push_back(detail::parse_p(e, v)); }))
    spec.p = {spec.base.p};
  if (!each("s", [&](const ConfigEntry& e, std::string_view v) { spec.s.push_back(detail::parse_s(e, v)); }))
    spec.s = {spec.base.s};
  if (!each("modes", [&](const ConfigEntry& e, std::string_view v) {
        auto var = parse_variant(v);
        if (!var) detail::bad_value("modes", e, "unknown variant `" + std::string(v) + "`");
        spec.variants.push_back(*var);
      }))
    spec.variants = {Variant{}};
  each("seeds", [&](const ConfigEntry& e, std::string_view v) {
    if (auto dots = v.find(".."); dots != std::string_view::npos) {
      const auto lo = detail::parse_scalar<std::uint64_t>("seeds", e, v.substr(0, dots));
      const auto hi = detail::parse_scalar<std::uint64_t>("seeds", e, v.substr(dots + 2));
      if (hi < lo) detail::bad_value("seeds", e, "empty range");
      for (auto k = lo; k <= hi; ++k) spec.seeds.push_back(k);
    } else {
      spec.seeds.push_back(detail::parse_scalar<std::uint64_t>("seeds", e, v));
    }
  });
  if (const ConfigEntry* e = kv.find("out")) spec.out = e->value;
  detail::apply_shared(kv, spec.base);
  return spec;
}

inline std::string render_sweep_spec(const SweepSpec& spec) {
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ", ";
      s += fmt(items[i]);
    }
    return s;
  };
  std::string out;
  out += "n = " + join(spec.n, [](int v) { return std::to_string(v); }) + "\n";
  out += "p = " + join(spec.p, [](double v) { return format_number(v); }) + "\n";
  out += "s = " + join(spec.s, [](int v) { return std::to_string(v); }) + "\n";
  out += "modes = " + join(spec.variants, [](Variant v) { return variant_name(v); }) + "\n";
  out += "seeds = " + join(spec.seeds, [](std::uint64_t v) { return std::to_string(v); }) + "\n";
  out += "out = " + spec.out + "\n";
  detail::render_shared(out, spec.base);
  return out;
}

using ParsedConfig = std::variant<SimConfig, SweepSpec>;

inline ParsedConfig parse_config(std::string_view text) {
  const KeyValues kv = KeyValues::parse(text);
  if (kv.has("seeds") || kv.has("modes")) return parse_sweep_spec(text);
  return parse_sim_config(text);
}

// The full study grid regenerated by `reproduce`.
inline constexpr std::string_view kStudyGridSpec =
    "# Parameter grid: population, compliance rate and sign count, every display variant.\n"
    "n = 1000, 4000, 7000, 10000\n"
    "p = 0.3, 0.5, 0.7, 1.0\n"
    "s = 4, 6, 8\n"
    "modes = off, default, congestion-p1, congestion-p2\n"
    "seeds = 0..9\n"
    "out = results\n";

inline SweepSpec study_grid_spec() { return parse_sweep_spec(kStudyGridSpec); }

// Directory-safe identifier, e.g. "n4000-p30-s8-congestion-p1".
inline std::string config_id(const SimConfig& c) {
  const double pct = std::round(c.p * 1000.0) / 10.0;
  return "n" + std::to_string(c.n) + "-p" + format_number(pct) + "-s" + std::to_string(c.s) + "-" +
         variant_name(variant_of(c));
}

}  // namespace cceg
