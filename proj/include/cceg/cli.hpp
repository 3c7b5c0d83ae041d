#pragma once
// Command-line front end. Exit codes: 0 success, 1 configuration or usage
// error, 2 I/O error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "cceg/config.hpp"
#include "cceg/engine.hpp"
#include "cceg/scenario.hpp"
#include "cceg/sweep.hpp"
#include "cceg/synthetic_mall.hpp"

namespace cceg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

namespace detail {

struct RunFlags {
  std::optional<std::string> config, map, layout, mode, policy;
  std::optional<int> n, s, window, max_steps, capacity, pa_step, blocked, designated;
  std::optional<double> p, theta, delta;
  std::optional<std::uint64_t> seed;
  std::string out;
};

inline SimConfig build_run_config(const RunFlags& f) {
  SimConfig c;
  if (f.config) {
    auto parsed = parse_config(read_file(*f.config));
    if (!std::holds_alternative<SimConfig>(parsed))
      throw ConfigError(*f.config + " is a sweep spec; use `sweep`");
    c = std::get<SimConfig>(parsed);
  } else if (!f.n) {
    throw ConfigError("missing required key `n` (pass --n or --config)");
  }
  if (f.map) c.map = *f.map;
  if (f.layout) c.layout = *f.layout;
  if (f.n) c.n = *f.n;
  if (f.p) c.p = *f.p;
  if (f.s) c.s = *f.s;
  if (f.mode) {
    if (*f.mode == "off") c.controller.mode = DisplayMode::Off;
    else if (*f.mode == "default") c.controller.mode = DisplayMode::Default;
    else if (*f.mode == "congestion") c.controller.mode = DisplayMode::Congestion;
    else throw ConfigError("--mode: expected off, default or congestion, got `" + *f.mode + "`");
  }
  if (f.policy) {
    if (*f.policy == "p1") c.controller.policy = Policy::P1;
    else if (*f.policy == "p2") c.controller.policy = Policy::P2;
    else throw ConfigError("--policy: expected p1 or p2, got `" + *f.policy + "`");
  }
  if (f.theta) c.controller.theta = *f.theta;
  if (f.delta) c.controller.delta = *f.delta;
  if (f.window) c.controller.window = *f.window;
  if (f.seed) c.seed = *f.seed;
  if (f.max_steps) c.max_steps = *f.max_steps;
  if (f.capacity) c.cell_capacity = *f.capacity;
  if (f.pa_step) c.pa_step = *f.pa_step;
  if (f.blocked) c.pa.blocked_exit = *f.blocked;
  if (f.designated) c.pa.designated_exit = *f.designated;
  validate(c);
  return c;
}

// "r.csv" -> "r" + suffix, next to it.
inline std::filesystem::path sibling(const std::filesystem::path& csv, const std::string& suffix) {
  std::filesystem::path p = csv;
  if (p.extension() == ".csv") p.replace_extension();
  p += suffix;
  return p;
}

inline std::string t_string(const std::optional<int>& t) {
  return t ? std::to_string(*t) : std::string("capped");
}

inline void print_summary(std::ostream& out, const SweepResult& r, const std::filesystem::path& dir) {
  std::size_t capped = 0;
  for (const SweepRow& row : r.rows) capped += row.capped;
  out << r.rows.size() << " runs (" << capped << " capped) written to " << dir.string() << "\n";
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Crowd evacuation with congestion-aware exit guidance on repurposed signs", "cceg"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  detail::RunFlags rf;
  auto* run_cmd = app.add_subcommand("run", "Run one simulation");
  run_cmd->add_option("--config", rf.config, "Config file; flags override its values");
  run_cmd->add_option("--map", rf.map, "\"default\" or a map file");
  run_cmd->add_option("--layout", rf.layout, "\"default\" or a sign layout file");
  run_cmd->add_option("--n", rf.n, "Agents");
  run_cmd->add_option("--p", rf.p, "Compliance probability");
  run_cmd->add_option("--s", rf.s, "Signs");
  run_cmd->add_option("--mode", rf.mode, "off | default | congestion");
  run_cmd->add_option("--policy", rf.policy, "p1 | p2");
  run_cmd->add_option("--theta", rf.theta, "Policy 1 density threshold");
  run_cmd->add_option("--delta", rf.delta, "Policy 2 slope threshold");
  run_cmd->add_option("--window", rf.window, "Policy 2 window");
  run_cmd->add_option("--seed", rf.seed);
  run_cmd->add_option("--max-steps", rf.max_steps);
  run_cmd->add_option("--capacity", rf.capacity, "Agents per cell");
  run_cmd->add_option("--pa-step", rf.pa_step);
  run_cmd->add_option("--blocked", rf.blocked, "Exit reported blocked");
  run_cmd->add_option("--designated", rf.designated, "Exit named by the PA");
  run_cmd->add_option("--out", rf.out, "Metrics CSV; .signs.csv and .config.txt go next to it")
      ->required();

  std::string spec_path;
  std::optional<std::string> sweep_out;
  unsigned jobs = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run every (config, seed) pair of a sweep spec");
  sweep_cmd->add_option("spec", spec_path, "Sweep spec file")->required();
  sweep_cmd->add_option("--out", sweep_out, "Output directory (overrides the spec)");
  sweep_cmd->add_option("--jobs", jobs, "Worker threads; 0 = all cores, 1 = serial");

  std::string repro_out = "results";
  std::vector<int> repro_n;
  std::vector<std::uint64_t> repro_seeds;
  auto* repro_cmd = app.add_subcommand("reproduce", "Run the full study grid");
  repro_cmd->add_option("--out", repro_out, "Output directory")->capture_default_str();
  repro_cmd->add_option("--n", repro_n, "Restrict populations");
  repro_cmd->add_option("--seeds", repro_seeds, "Replace the seed list");
  repro_cmd->add_option("--jobs", jobs, "Worker threads; 0 = all cores, 1 = serial");

  std::uint64_t gen_seed = kDefaultMallSeed;
  std::optional<std::string> gen_out;
  auto* gen_cmd = app.add_subcommand("map-gen", "Emit a synthetic mall map");
  gen_cmd->add_option("--seed", gen_seed)->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Map file (stdout if omitted)");

  std::optional<std::string> v_map, v_layout, v_config;
  auto* val_cmd = app.add_subcommand("validate", "Check a map, layout or config without running");
  val_cmd->add_option("--map", v_map);
  val_cmd->add_option("--layout", v_layout);
  val_cmd->add_option("--config", v_config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*run_cmd) {
      const SimConfig c = detail::build_run_config(rf);
      const MetricsSeries m = run(c, load_scenario(c.map, c.layout));
      write_file(rf.out, metrics_csv(m));
      write_file(detail::sibling(rf.out, ".signs.csv"), sign_log_csv(m));
      write_file(detail::sibling(rf.out, ".config.txt"), m.config_echo);
      out << "evacuated " << m.records.back().evacuated << "/" << m.n << " in " << m.final_step()
          << " steps (t50 " << detail::t_string(time_to_percent(m, 50)) << ", t90 "
          << detail::t_string(time_to_percent(m, 90)) << ")" << (m.capped ? ", capped" : "")
          << "\n";
    } else if (*sweep_cmd) {
      auto parsed = parse_config(read_file(spec_path));
      if (!std::holds_alternative<SweepSpec>(parsed))
        throw ConfigError(spec_path + " is a single-run config (no `seeds`); use `run`");
      SweepSpec spec = std::get<SweepSpec>(parsed);
      if (sweep_out) spec.out = *sweep_out;
      detail::print_summary(out, run_sweep(spec, jobs), spec.out);
    } else if (*repro_cmd) {
      SweepSpec spec = study_grid_spec();
      spec.out = repro_out;
      if (!repro_n.empty()) spec.n = repro_n;
      if (!repro_seeds.empty()) spec.seeds = repro_seeds;
      detail::print_summary(out, run_sweep(spec, jobs), spec.out);
    } else if (*gen_cmd) {
      const std::string text = render_map(generate_synthetic_mall(gen_seed));
      if (gen_out) write_file(*gen_out, text);
      else out << text;
    } else if (*val_cmd) {
      if (!v_map && !v_layout && !v_config) throw ConfigError("validate: pass --map, --layout or --config");
      const std::string map = v_map.value_or("default");
      const std::string layout = v_layout.value_or("default");
      auto scenario = load_scenario(map, layout);
      if (v_map) {
        out << map << ": " << scenario->plan.width() << "x" << scenario->plan.height() << ", "
            << scenario->plan.walkable_count() << " walkable cells, "
            << scenario->plan.exits().size() << " exits, ok\n";
      }
      if (v_layout) {
        place_signs(scenario->plan, static_cast<int>(scenario->layout.size()), scenario->layout);
        out << layout << ": " << scenario->layout.size() << " signs, ok\n";
      }
      if (v_config) {
        auto parsed = parse_config(read_file(*v_config));
        std::vector<SimConfig> configs;
        if (auto* c = std::get_if<SimConfig>(&parsed)) configs.push_back(*c);
        else configs = std::get<SweepSpec>(parsed).expand();
        std::map<std::pair<std::string, std::string>, std::shared_ptr<const Scenario>> loaded;
        for (SimConfig c : configs) {
          if (v_map) c.map = map;
          if (v_layout) c.layout = layout;
          try {
            auto& sc = loaded[{c.map, c.layout}];
            if (!sc) sc = load_scenario(c.map, c.layout);
            SimConfig structural = c;
            structural.n = 0;  // placement and routing checks only
            Simulation sim(sc, structural);
          } catch (const ConfigError& e) {
            throw ConfigError("config " + config_id(c) + ": " + e.what());
          }
        }
        out << *v_config << ": " << configs.size() << " config(s), ok\n";
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace cceg
