#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "radiomap/gridmap.hpp"
#include "radiomap/measurement.hpp"

using namespace radiomap;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string command = std::string(RADIOMAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_scenario(const fs::path& path) {
  std::ofstream os(path);
  os << R"({
    "transmitters": [
      {"location": [5.0, 5.0], "power_db": 10.0},
      {"location": [15.0, 12.0], "power_db": 4.0}
    ],
    "path_loss_exponent": 2.0,
    "shadowing": {"sigma2": 4.0, "decorrelation_distance": 6.0, "mean": 0.0},
    "seed": 11,
    "grid": {"lower": [0.0, 0.0], "upper": [20.0, 20.0], "counts": [10, 10]}
  })";
}

void write_consensus_scenario(const fs::path& path) {
  std::ofstream os(path);
  os << R"({
    "num_agents": 3,
    "edges": [[0, 1], [1, 2], [2, 0]],
    "rho": 1.0,
    "regularizer": "squared_norm",
    "regularizer_weight": 0.3,
    "tol": 1e-7,
    "max_rounds": 5000,
    "synthetic": {"dim": 3, "rows_per_agent": 8, "seed": 3, "noise": 0.05}
  })";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then estimate then eval") {
  TempDir dir("radiomap_cli_test_pipeline");
  write_scenario(dir.path / "scenario.json");

  REQUIRE(run_cli("--scenario " + (dir.path / "scenario.json").string() + " --out " +
                  (dir.path / "sim").string() + " --seed 5 simulate --count 30 --noise 0.25") == 0);
  CHECK(fs::exists(dir.path / "sim" / "truth.map"));
  CHECK(fs::exists(dir.path / "sim" / "truth_db.map"));
  CHECK(fs::exists(dir.path / "sim" / "measurements.csv"));

  REQUIRE(run_cli("--scenario " + (dir.path / "scenario.json").string() + " --out " +
                  (dir.path / "est").string() +
                  " --seed 5 estimate --estimator krr --count 30 --noise 0.25 "
                  "--hyper sigma=3.0 --hyper lambda=1e-4") == 0);
  CHECK(fs::exists(dir.path / "est" / "estimate.map"));
  const std::string metrics = slurp(dir.path / "est" / "metrics.json");
  CHECK(metrics.find("mse_db") != std::string::npos);
  CHECK(metrics.find("radiomap.metrics.v1") != std::string::npos);

  REQUIRE(run_cli("eval " + (dir.path / "est" / "estimate.map").string() + " " +
                  (dir.path / "sim" / "truth_db.map").string() + " --metrics-out " +
                  (dir.path / "eval.json").string()) == 0);
  CHECK(slurp(dir.path / "eval.json").find("mse") != std::string::npos);

  // The estimated map file round-trips through the gridmap loader.
  const GridMap estimate = load_gridmap((dir.path / "est" / "estimate.map").string());
  CHECK(estimate.unit() == Unit::kDb);
  CHECK(estimate.grid().size() == 100);
}

TEST_CASE("commands are byte-deterministic in the seed") {
  TempDir dir("radiomap_cli_test_determinism");
  write_scenario(dir.path / "scenario.json");
  const std::string scenario = (dir.path / "scenario.json").string();

  REQUIRE(run_cli("--out " + (dir.path / "a").string() + " --seed 9 figures all") == 0);
  REQUIRE(run_cli("--out " + (dir.path / "b").string() + " --seed 9 figures all") == 0);
  for (const std::string name : {"fig1", "fig2", "fig3", "fig4", "fig5"}) {
    CHECK(slurp(dir.path / "a" / (name + ".csv")) == slurp(dir.path / "b" / (name + ".csv")));
    CHECK(slurp(dir.path / "a" / (name + ".svg")) == slurp(dir.path / "b" / (name + ".svg")));
  }
  CHECK(slurp(dir.path / "a" / "metrics.json") == slurp(dir.path / "b" / "metrics.json"));

  REQUIRE(run_cli("--scenario " + scenario + " --out " + (dir.path / "s1").string() +
                  " --seed 4 simulate --count 10 --noise 0.1") == 0);
  REQUIRE(run_cli("--scenario " + scenario + " --out " + (dir.path / "s2").string() +
                  " --seed 4 simulate --count 10 --noise 0.1") == 0);
  CHECK(slurp(dir.path / "s1" / "truth.map") == slurp(dir.path / "s2" / "truth.map"));
  CHECK(slurp(dir.path / "s1" / "measurements.csv") == slurp(dir.path / "s2" / "measurements.csv"));
}

TEST_CASE("survey writes a trajectory") {
  TempDir dir("radiomap_cli_test_survey");
  write_scenario(dir.path / "scenario.json");
  REQUIRE(run_cli("--scenario " + (dir.path / "scenario.json").string() + " --out " +
                  (dir.path / "survey").string() +
                  " --seed 2 survey --budget 6 --travel-weight 0.1 --noise 0.04") == 0);
  const std::string trajectory = slurp(dir.path / "survey" / "trajectory.csv");
  CHECK(trajectory.rfind("step,x,y,z,mse,total_variance", 0) == 0);
  int lines = 0;
  for (char ch : trajectory) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == 7);  // header + 6 steps
}

TEST_CASE("admm writes convergence history and solution") {
  TempDir dir("radiomap_cli_test_admm");
  write_consensus_scenario(dir.path / "consensus.json");
  REQUIRE(run_cli("--scenario " + (dir.path / "consensus.json").string() + " --out " +
                  (dir.path / "admm").string() + " admm") == 0);
  const std::string convergence = slurp(dir.path / "admm" / "convergence.csv");
  CHECK(convergence.rfind("round,max_disagreement,max_change", 0) == 0);
  const std::string result = slurp(dir.path / "admm" / "result.json");
  CHECK(result.find("\"converged\": true") != std::string::npos);
}

TEST_CASE("validation failures exit with code 2") {
  TempDir dir("radiomap_cli_test_errors");
  CHECK(run_cli("--scenario /nonexistent.json --out " + (dir.path / "x").string() + " simulate") ==
        2);
  CHECK(run_cli("figures nosuchfigure --out " + (dir.path / "y").string()) == 2);
  CHECK(run_cli("estimate --estimator krr") == 2);  // missing --scenario
}

}  // TEST_SUITE
