#pragma once
// Sweeps: every (config, seed) pair of a SweepSpec, run on a worker pool and
// written as
//   <out>/<config-id>/seed<k>.csv         metrics
//   <out>/<config-id>/seed<k>.signs.csv   sign-change log
//   <out>/aggregate.csv                   one row per run
//   <out>/config-echo.txt                 the spec and every expanded config

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "cceg/config.hpp"
#include "cceg/engine.hpp"
#include "cceg/scenario.hpp"

namespace cceg {

struct SweepRow {
  SimConfig config;  // seed filled in
  double final_rate = 0.0;
  std::optional<int> t50;
  std::optional<int> t90;
  int steps = 0;
  bool capped = false;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (n, p, s, mode, policy, seed)
};

inline SweepRow summarize(const SimConfig& config, const MetricsSeries& m) {
  SweepRow row;
  row.config = config;
  row.final_rate = m.records.back().rate;
  row.t50 = time_to_percent(m, 50);
  row.t90 = time_to_percent(m, 90);
  row.steps = m.final_step();
  row.capped = m.capped;
  return row;
}

inline std::string aggregate_csv(const SweepResult& result) {
  std::string out = "config_id,n,p,s,mode,policy,seed,final_rate,t50,t90,steps,capped\n";
  auto t = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("capped"); };
  char buf[64];
  for (const SweepRow& r : result.rows) {
    const SimConfig& c = r.config;
    std::snprintf(buf, sizeof buf, "%.6f", r.final_rate);
    out += config_id(c) + ',' + std::to_string(c.n) + ',' + format_number(c.p) + ',' +
           std::to_string(c.s) + ',' + std::string(mode_name(c.controller.mode)) + ',' +
           std::string(policy_name(c.controller.policy)) + ',' + std::to_string(c.seed) + ',' + buf +
           ',' + t(r.t50) + ',' + t(r.t90) + ',' + std::to_string(r.steps) + ',' +
           (r.capped ? "true" : "false") + '\n';
  }
  return out;
}

// 0 picks the hardware concurrency.
inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs every pair; with `write` false nothing touches the file system. A
// configuration error in any run aborts the sweep and names the config.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 0, bool write = true) {
  if (spec.seeds.empty()) throw ConfigError("sweep has no seeds");
  const std::vector<SimConfig> configs = spec.expand();
  for (const SimConfig& c : configs) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      throw ConfigError("config " + config_id(c) + ": " + e.what());
    }
  }

  // Scenarios shared by every run using the same map and layout.
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const Scenario>> scenarios;
  for (const SimConfig& c : configs) {
    auto& slot = scenarios[{c.map, c.layout}];
    if (!slot) slot = load_scenario(c.map, c.layout);
  }

  std::vector<SimConfig> runs;
  for (const SimConfig& c : configs)
    for (std::uint64_t seed : spec.seeds) {
      SimConfig r = c;
      r.seed = seed;
      runs.push_back(r);
    }

  const std::filesystem::path out = spec.out;
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
    std::string echo = "# sweep\n" + render_sweep_spec(spec);
    for (const SimConfig& c : configs) echo += "\n# " + config_id(c) + "\n" + render_config(c);
    write_file(out / "config-echo.txt", echo);
  }

  std::vector<SweepRow> rows(runs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; !failed && (i = next++) < runs.size();) {
      const SimConfig& c = runs[i];
      try {
        try {
          MetricsSeries m = run(c, scenarios.at({c.map, c.layout}));
          if (write) {
            const auto dir = out / config_id(c);
            const std::string stem = "seed" + std::to_string(c.seed);
            write_file(dir / (stem + ".csv"), metrics_csv(m));
            write_file(dir / (stem + ".signs.csv"), sign_log_csv(m));
          }
          rows[i] = summarize(c, m);
        } catch (const ConfigError& e) {
          throw ConfigError("config " + config_id(c) + " seed " + std::to_string(c.seed) + ": " +
                            e.what());
        } catch (const RoutingError& e) {
          throw ConfigError("config " + config_id(c) + " seed " + std::to_string(c.seed) + ": " +
                            e.what());
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const unsigned n_threads = std::min<std::size_t>(resolve_jobs(jobs), runs.size());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const SimConfig& x = a.config;
    const SimConfig& y = b.config;
    return std::tuple(x.n, x.p, x.s, x.controller.mode, x.controller.policy, x.seed) <
           std::tuple(y.n, y.p, y.s, y.controller.mode, y.controller.policy, y.seed);
  });
  SweepResult result{std::move(rows)};
  if (write) write_file(out / "aggregate.csv", aggregate_csv(result));
  return result;
}

}  // namespace cceg
