#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cceg/cli.hpp"

using namespace cceg;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cceg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cceg_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, RunWritesMetricsAndCompanions) {
  const fs::path dir = fresh_dir("run");
  const std::string out = (dir / "r.csv").string();
  const Result r = cli({"run", "--map", "default", "--n", "400", "--p", "0.3", "--s", "8", "--mode",
                        "default", "--seed", "0", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(read_file(out).starts_with("step,evacuated,rate\n0,0,0.000000\n"));
  EXPECT_TRUE(read_file(dir / "r.signs.csv").starts_with("step,sign_id,old_exit,new_exit,density\n0,1,0,14,"));
  const std::string echo = read_file(dir / "r.config.txt");
  EXPECT_NE(echo.find("n = 400\n"), std::string::npos);
  EXPECT_NE(echo.find("theta = 1.5\n"), std::string::npos);
  EXPECT_NE(r.out.find("evacuated 400/400"), std::string::npos) << r.out;
  fs::remove_all(dir);
}

TEST(Cli, RunFromConfigWithOverride) {
  const fs::path dir = fresh_dir("runcfg");
  write_file(dir / "c.cfg", "n = 50\ns = 4\nmode = congestion\npolicy = p2\n");
  const Result r = cli({"run", "--config", (dir / "c.cfg").string(), "--seed", "3", "--out",
                        (dir / "o.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const SimConfig c = parse_sim_config(read_file(dir / "o.config.txt"));
  EXPECT_EQ(c.n, 50);
  EXPECT_EQ(c.s, 4);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.controller.policy, Policy::P2);
  fs::remove_all(dir);
}

TEST(Cli, UsageErrors) {
  Result r = cli({"explode"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos) << r.err;
  r = cli({"run", "--n", "5", "--out", "x.csv", "--colour", "red"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(Cli, ConfigErrorsExitOne) {
  const fs::path dir = fresh_dir("cfgerr");
  const std::string out = (dir / "r.csv").string();
  Result r = cli({"run", "--n", "10", "--p", "1.3", "--out", out});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("p must be"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"run", "--out", out}).code, 1);  // no n
  EXPECT_EQ(cli({"run", "--n", "10", "--s", "9", "--out", out}).code, 1);
  EXPECT_EQ(cli({"run", "--n", "10", "--mode", "sideways", "--out", out}).code, 1);
  EXPECT_FALSE(fs::exists(out));
  fs::remove_all(dir);
}

TEST(Cli, MissingFilesExitTwo) {
  const fs::path dir = fresh_dir("io");
  EXPECT_EQ(cli({"run", "--config", (dir / "nope.cfg").string(), "--out", (dir / "r.csv").string()}).code, 2);
  EXPECT_EQ(cli({"validate", "--map", (dir / "nope.map").string()}).code, 2);
  EXPECT_EQ(cli({"sweep", (dir / "nope.cfg").string()}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, ValidateMap) {
  const fs::path dir = fresh_dir("validate");
  write_file(dir / "ok.map", "1....2\n");
  write_file(dir / "split.map", "1..#.2\n");
  write_file(dir / "bad.map", "1..%.2\n");
  Result ok = cli({"validate", "--map", (dir / "ok.map").string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
  Result split = cli({"validate", "--map", (dir / "split.map").string()});
  EXPECT_EQ(split.code, 1);
  EXPECT_NE(split.err.find("unreachable"), std::string::npos) << split.err;
  Result bad = cli({"validate", "--map", (dir / "bad.map").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("line 1, column 4"), std::string::npos) << bad.err;
  fs::remove_all(dir);
}

TEST(Cli, ValidateConfigs) {
  EXPECT_EQ(cli({"validate", "--config", std::string(CCEG_CONFIG_DIR) + "/study_grid.cfg"}).code, 0);
  EXPECT_EQ(cli({"validate", "--config", std::string(CCEG_CONFIG_DIR) + "/example.cfg"}).code, 0);
  const fs::path dir = fresh_dir("valcfg");
  write_file(dir / "far.cfg", "n = 10\npa_designated = 15\n");
  EXPECT_EQ(cli({"validate", "--config", (dir / "far.cfg").string()}).code, 1);
  fs::remove_all(dir);
}

TEST(Cli, MapGenMatchesShippedMap) {
  const Result r = cli({"map-gen", "--seed", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, read_file(std::string(CCEG_DATA_DIR) + "/default_mall.map"));
}

TEST(Cli, SweepAndReproduceStayInOutputDirectory) {
  const fs::path dir = fresh_dir("sweep");
  write_file(dir / "spec.cfg", "n = 100\ns = 4\nmodes = default, congestion-p2\nseeds = 0, 1\nout = unused\n");
  const Result s = cli({"sweep", (dir / "spec.cfg").string(), "--out", (dir / "res").string(), "--jobs", "2"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(fs::exists(dir / "res" / "aggregate.csv"));
  EXPECT_FALSE(fs::exists("unused"));

  const Result r = cli({"reproduce", "--out", (dir / "grid").string(), "--n", "1000", "--seeds", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t config_dirs = 0;
  for (const auto& e : fs::directory_iterator(dir / "grid")) config_dirs += e.is_directory();
  EXPECT_EQ(config_dirs, 48u);
  EXPECT_TRUE(fs::exists(dir / "grid" / "config-echo.txt"));
  EXPECT_TRUE(fs::exists(dir / "grid" / "n1000-p70-s8-congestion-p2" / "seed0.csv"));
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 3u);  // spec.cfg, res, grid
  fs::remove_all(dir);
}
