#pragma once

#include <string>

#include "radiomap/consensus.hpp"
#include "radiomap/simulator.hpp"

namespace radiomap {

/// Scenario JSON: transmitters, path loss exponent, shadowing, fading,
/// optional SLF file reference, seed, and the evaluation grid.
struct Scenario {
  Environment environment;
  Grid grid;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir);
std::string scenario_to_json(const Scenario& scenario);

/// Consensus scenario JSON: edge list, rho, regularizer, tol, and
/// either per-agent data file references or a synthetic data block.
struct ConsensusScenario {
  int num_agents = 0;
  std::vector<std::pair<int, int>> edges;
  ConsensusRegularizer regularizer;
  double rho = 1.0;
  double tol = 1e-6;
  int max_rounds = 5000;
  std::vector<AgentData> data;
};

ConsensusScenario load_consensus_scenario(const std::string& path);
ConsensusScenario parse_consensus_scenario(const std::string& json_text, const std::string& base_dir);

}  // namespace radiomap
