#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quenchlab/quenchlab.hpp"

using namespace quenchlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QUENCHLAB_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(QUENCHLAB_CONFIGS) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("quenchlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_F(Cli, PressureOfFerroChain) {
  const auto r = run("pressure --config " + config("chain4_ferro.json"));
  ASSERT_EQ(r.code, 0);
  const auto record = lines(r.out).at(0);
  const double expected = (std::numbers::ln2 + 3.0 * std::log(2.0 * std::cosh(1.0))) / 4.0;
  EXPECT_NEAR(record["pressure_density"].get<double>(), expected, 1e-12);
  EXPECT_EQ(record["command"], "pressure");
  EXPECT_EQ(record["seed"], 0);
  EXPECT_EQ(record["config_hash"].get<std::string>().size(), 16u);
  EXPECT_TRUE(record.contains("tool_version"));
}

TEST_F(Cli, ZeroBetaIsLn2) {
  const auto r = run("pressure --config " + config("chain4_ferro.json") + " --beta 0");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).at(0)["pressure_density"].get<double>(), std::numbers::ln2);
}

TEST_F(Cli, FlagOverridesChangeConfigHash) {
  const auto a = lines(run("pressure --config " + config("chain4_ferro.json")).out).at(0);
  const auto b = lines(run("pressure --config " + config("chain4_ferro.json") + " --beta 0.5").out).at(0);
  EXPECT_NE(a["config_hash"], b["config_hash"]);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("pressure --config " + write("bad.json", "{\"model\": ")).code, 2);
  EXPECT_EQ(run("pressure --config " + write("nomodel.json", "{\"run\": {\"beta\": 1}}")).code, 2);
  EXPECT_EQ(run("pressure").code, 2);
  EXPECT_EQ(run("verify --checks nope").code, 2);
  EXPECT_EQ(run("limit --config " + config("ferro_chain.json") + " --format xml").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, NegativeCouplingInGriffithsInstanceExitsTwo) {
  EXPECT_EQ(run("verify --config " + config("griffiths_negated.json")).code, 2);
}

TEST_F(Cli, CapacityExitsThree) {
  const auto cfg = write("big.json", R"({
    "model": {"dimension": 1, "orbits": [{"sites": [[0], [1]], "distribution": {"kind": "deterministic", "value": 1.0}}]},
    "region": {"box_side": 40}, "run": {"beta": 1.0}})");
  EXPECT_EQ(run("pressure --config " + cfg).code, 3);
  // 22 sites, 21 rademacher bonds: 2^21 disorder outcomes
  const auto glass = write("glass.json", R"({
    "model": {"dimension": 1, "orbits": [{"sites": [[0], [1]], "distribution": {"kind": "rademacher"}}]},
    "region": {"box_side": 22}, "run": {"beta": 1.0}})");
  EXPECT_EQ(run("quenched --exact --config " + glass).code, 3);
}

TEST_F(Cli, IoErrorsExitFour) {
  EXPECT_EQ(run("pressure --config " + config("chain4_ferro.json") + " --out /nonexistent/dir/out.json").code, 4);
  EXPECT_EQ(run("pressure --config " + path("missing.json")).code, 4);
}

TEST_F(Cli, OutFileMatchesStdout) {
  const auto out = path("p.json");
  ASSERT_EQ(run("pressure --config " + config("chain4_ferro.json") + " --out " + out).code, 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), run("pressure --config " + config("chain4_ferro.json")).out);
}

TEST_F(Cli, VerifySelectedChecksOnly) {
  const auto r = run("verify --checks scalar --threads 1");
  ASSERT_EQ(r.code, 0);
  const auto records = lines(r.out);
  ASSERT_EQ(records.size(), 2u);
  for (const auto& rec : records) {
    EXPECT_EQ(rec["name"].get<std::string>().rfind("scalar_", 0), 0u);
    EXPECT_TRUE(rec["passed"].get<bool>());
    EXPECT_EQ(rec["command"], "verify");
  }
}

TEST_F(Cli, ViolationWritesReplayThatReproduces) {
  // two couplings on one bond; with two disorder samples that coincide the
  // standard error is zero and the oracle check reports a violation
  const DisorderedHamiltonian model(Region::box(1, 2), {Rademacher{}, Rademacher{}},
                                    {{0b11, 1.0, 0}, {0b11, 1.0, 1}});
  std::uint64_t seed = 0;
  while (quenched_mc(model, 1.0, 2, seed).std_error != 0.0) ++seed;
  const json instance{{"check", "oracle"}, {"beta", 1.0}, {"samples", 2}, {"seed", seed},
                      {"model", disordered_to_json(model)}};
  const auto cfg = write("oracle.json", json{{"instances", {instance}}}.dump());
  const auto replay = path("replay.json");
  const auto first = run("verify --config " + cfg + " --replay " + replay);
  ASSERT_EQ(first.code, 1);
  ASSERT_TRUE(fs::exists(replay));
  const auto second = run("verify --config " + replay + " --replay " + path("replay2.json"));
  EXPECT_EQ(second.code, 1);
  EXPECT_EQ(lines(first.out).at(0)["max_violation"], lines(second.out).at(0)["max_violation"]);
}

TEST_F(Cli, OutputIndependentOfThreadCount) {
  for (const std::string& args : std::vector<std::string>{"verify --checks ratio,oracle,limit --seed 5",
                                 "quenched --config " + config("gaussian_chain.json") + " --samples 2000",
                                 "limit --config " + config("pareto_chain.json") + " --samples 500",
                                 "truncation --config " + config("pareto_chain.json") + " --samples 500"}) {
    const auto one = run(args + " --threads 1");
    const auto four = run(args + " --threads 4");
    ASSERT_EQ(one.code, four.code) << args;
    EXPECT_EQ(one.out, four.out) << args;
    EXPECT_FALSE(one.out.empty());
  }
}

TEST_F(Cli, LimitCsvForFerroChain) {
  const auto r = run("limit --config " + config("ferro_chain.json"));
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(r.out.rfind("# command=limit", 0), 0u);
  const auto rows = csv_rows(r.out);
  ASSERT_GE(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"N", "pressure", "std_error", "bound", "exact_flag"}));
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    EXPECT_LT(std::stod(rows[i][1]), std::stod(rows[i + 1][1]));
    EXPECT_LT(std::stod(rows[i][1]), std::stod(rows[i][3]));
    EXPECT_EQ(rows[i][4], "1");
  }
}

TEST_F(Cli, LimitJsonCarriesBound) {
  const auto r = run("limit --config " + config("gaussian_chain.json") + " --format json --samples 300");
  ASSERT_EQ(r.code, 0);
  const auto rec = lines(r.out).at(0);
  EXPECT_EQ(rec["bound_kind"], "l2sq");
  EXPECT_LE(rec["sup_pressure"].get<double>(), rec["claimed_limit_bound"].get<double>());
}

TEST_F(Cli, TruncationBoundColumn) {
  const auto r = run("truncation --config " + config("pareto_chain.json") + " --samples 2000");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"R", "tail_abs_mean", "difference", "std_error", "bound"}));
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double cutoff = std::stod(rows[i][0]);
    // 2 beta (5 bonds / 6 sites) E|J^(2)|, E|J^(2)| = 3 / sqrt(R)
    EXPECT_NEAR(std::stod(rows[i][4]), 2.0 * 5.0 / 6.0 * 3.0 / std::sqrt(cutoff), 1e-12);
    EXPECT_LE(std::stod(rows[i][2]), std::stod(rows[i][4]) + 5.0 * std::stod(rows[i][3]));
  }
}

TEST_F(Cli, QuenchedExactRademacher) {
  const auto r = run("quenched --exact --config " + config("rademacher_chain.json"));
  ASSERT_EQ(r.code, 0);
  const auto rec = lines(r.out).at(0);
  EXPECT_TRUE(rec["exact"].get<bool>());
  EXPECT_EQ(rec["std_error"], 0.0);
  EXPECT_LE(rec["mean"].get<double>(), rec["bound"]["value"].get<double>());
}

TEST_F(Cli, FullSuiteOnDefaultCorpusPasses) {
  const auto r = run("verify --config " + config("verify_default.json") + " --replay " + path("replay.json"));
  ASSERT_EQ(r.code, 0);
  const auto records = lines(r.out);
  EXPECT_GE(records.size(), 20u);
  for (const auto& rec : records) EXPECT_TRUE(rec["passed"].get<bool>()) << rec["name"];
  EXPECT_FALSE(fs::exists(path("replay.json")));
}
