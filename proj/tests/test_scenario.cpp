#include <fstream>

#include "doctest.h"
#include "radiomap/scenario.hpp"

using namespace radiomap;

TEST_SUITE("scenario") {

TEST_CASE("environment scenario json round trip") {
  const std::string text = R"({
    "transmitters": [
      {"location": [10.0, 20.0], "power_db": 7.5},
      {"location": [40.0, 40.0], "power_db": -2.0, "psd_coefficients": [1.0, 0.5]}
    ],
    "path_loss_exponent": 2.4,
    "shadowing": {"sigma2": 6.0, "decorrelation_distance": 8.0, "mean": 1.0},
    "fading": {"sigma2": 0.5, "mean": 0.0},
    "seed": 42,
    "grid": {"lower": [0.0, 0.0], "upper": [50.0, 50.0], "counts": [10, 10]}
  })";
  const Scenario s = parse_scenario(text, ".");
  CHECK(s.environment.transmitters.size() == 2);
  CHECK(s.environment.transmitters[0].power_db == doctest::Approx(7.5));
  CHECK(s.environment.transmitters[1].psd_coefficients.size() == 2);
  CHECK(s.environment.path_loss_exponent == doctest::Approx(2.4));
  CHECK(s.environment.shadowing.decorrelation_distance == doctest::Approx(8.0));
  CHECK(s.environment.seed == 42);
  CHECK(s.grid.size() == 100);

  const Scenario back = parse_scenario(scenario_to_json(s), ".");
  CHECK(back.environment.transmitters.size() == 2);
  CHECK(back.environment.shadowing.sigma2 == doctest::Approx(6.0));
  CHECK(back.grid == s.grid);
}

TEST_CASE("scenario with an slf file reference") {
  const Grid g(Region(Location(0.0, 0.0), Location(4.0, 4.0)), 2, 2);
  save_gridmap(GridMap(g, 0.3, Unit::kDb), "scenario_test_slf.map");
  const std::string text = R"({
    "transmitters": [{"location": [1.0, 1.0], "power_db": 0.0}],
    "slf_file": "scenario_test_slf.map",
    "grid": {"lower": [0.0, 0.0], "upper": [4.0, 4.0], "counts": [2, 2]}
  })";
  const Scenario s = parse_scenario(text, ".");
  REQUIRE(s.environment.slf.has_value());
  CHECK(s.environment.slf->values().size() == 4);
  CHECK(s.environment.slf->at(0) == doctest::Approx(0.3));
}

TEST_CASE("invalid scenarios are rejected") {
  CHECK_THROWS(parse_scenario(R"({"transmitters": [], "path_loss_exponent": -1,
    "grid": {"lower": [0.0], "upper": [1.0], "counts": [2]}})",
                              "."));
}

TEST_CASE("consensus scenario with synthetic data") {
  const std::string text = R"({
    "num_agents": 3,
    "edges": [[0, 1], [1, 2], [2, 0]],
    "rho": 1.5,
    "regularizer": "squared_norm",
    "regularizer_weight": 0.2,
    "tol": 1e-5,
    "max_rounds": 2000,
    "synthetic": {"dim": 3, "rows_per_agent": 6, "seed": 5, "noise": 0.01}
  })";
  const ConsensusScenario s = parse_consensus_scenario(text, ".");
  CHECK(s.num_agents == 3);
  CHECK(s.edges.size() == 3);
  CHECK(s.rho == doctest::Approx(1.5));
  CHECK(s.regularizer.kind == ConsensusRegularizer::Kind::kSquaredNorm);
  CHECK(s.data.size() == 3);
  CHECK(s.data[0].x.rows() == 6);
  CHECK(s.data[0].x.cols() == 3);
}

TEST_CASE("consensus scenario with inline agent data") {
  const std::string text = R"({
    "num_agents": 2,
    "edges": [[0, 1]],
    "regularizer": "none",
    "agents": [
      {"x": [[1.0, 0.0], [0.0, 1.0]], "y": [1.0, 2.0]},
      {"x": [[1.0, 1.0]], "y": [3.0]}
    ]
  })";
  const ConsensusScenario s = parse_consensus_scenario(text, ".");
  CHECK(s.data.size() == 2);
  CHECK(s.data[0].x(1, 1) == doctest::Approx(1.0));
  CHECK(s.data[1].y(0) == doctest::Approx(3.0));
}

}  // TEST_SUITE
