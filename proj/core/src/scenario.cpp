#include "radiomap/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "radiomap/random.hpp"

namespace radiomap {

using json = nlohmann::json;

namespace {

Location location_from_json(const json& j) {
  std::vector<double> coords = j.get<std::vector<double>>();
  return Location(std::span<const double>(coords));
}

json location_to_json(const Location& loc) {
  json j = json::array();
  for (int a = 0; a < loc.dim(); ++a) j.push_back(loc[a]);
  return j;
}

Grid grid_from_json(const json& j) {
  const Region region(location_from_json(j.at("lower")), location_from_json(j.at("upper")));
  std::vector<int> counts = j.at("counts").get<std::vector<int>>();
  return Grid(region, std::span<const int>(counts));
}

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
  const json j = json::parse(json_text);
  Scenario scenario;
  Environment& env = scenario.environment;

  for (const json& t : j.at("transmitters")) {
    Transmitter tx;
    tx.location = location_from_json(t.at("location"));
    tx.power_db = t.value("power_db", 0.0);
    if (t.contains("psd_coefficients")) {
      tx.psd_coefficients = t.at("psd_coefficients").get<std::vector<double>>();
    }
    env.transmitters.push_back(std::move(tx));
  }
  env.path_loss_exponent = j.value("path_loss_exponent", 2.0);
  if (j.contains("shadowing")) {
    const json& s = j.at("shadowing");
    env.shadowing.sigma2 = s.value("sigma2", 0.0);
    env.shadowing.decorrelation_distance = s.value("decorrelation_distance", 1.0);
    env.shadowing.mean = s.value("mean", 0.0);
  }
  if (j.contains("fading")) {
    const json& f = j.at("fading");
    env.fading.sigma2 = f.value("sigma2", 0.0);
    env.fading.mean = f.value("mean", 0.0);
  }
  if (j.contains("slf_file")) {
    const std::filesystem::path p =
        std::filesystem::path(base_dir) / j.at("slf_file").get<std::string>();
    env.slf = load_gridmap(p.string());
  }
  env.seed = j.value("seed", 0ULL);
  scenario.grid = grid_from_json(j.at("grid"));
  validate(env);
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path), std::filesystem::path(path).parent_path().string());
}

std::string scenario_to_json(const Scenario& scenario) {
  json j;
  j["transmitters"] = json::array();
  for (const Transmitter& tx : scenario.environment.transmitters) {
    json t;
    t["location"] = location_to_json(tx.location);
    t["power_db"] = tx.power_db;
    if (!tx.psd_coefficients.empty()) t["psd_coefficients"] = tx.psd_coefficients;
    j["transmitters"].push_back(std::move(t));
  }
  j["path_loss_exponent"] = scenario.environment.path_loss_exponent;
  j["shadowing"] = {{"sigma2", scenario.environment.shadowing.sigma2},
                    {"decorrelation_distance", scenario.environment.shadowing.decorrelation_distance},
                    {"mean", scenario.environment.shadowing.mean}};
  j["fading"] = {{"sigma2", scenario.environment.fading.sigma2},
                 {"mean", scenario.environment.fading.mean}};
  j["seed"] = scenario.environment.seed;
  const Grid& g = scenario.grid;
  json lower = json::array(), upper = json::array(), counts = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    lower.push_back(g.region().lower[a]);
    upper.push_back(g.region().upper[a]);
    counts.push_back(g.count(a));
  }
  j["grid"] = {{"lower", lower}, {"upper", upper}, {"counts", counts}};
  return j.dump(2);
}

ConsensusScenario parse_consensus_scenario(const std::string& json_text, const std::string& base_dir) {
  const json j = json::parse(json_text);
  ConsensusScenario scenario;
  scenario.num_agents = j.at("num_agents").get<int>();
  for (const json& e : j.at("edges")) {
    scenario.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  scenario.rho = j.value("rho", 1.0);
  scenario.tol = j.value("tol", 1e-6);
  scenario.max_rounds = j.value("max_rounds", 5000);

  const std::string reg = j.value("regularizer", "none");
  if (reg == "none") {
    scenario.regularizer.kind = ConsensusRegularizer::Kind::kNone;
  } else if (reg == "squared_norm") {
    scenario.regularizer.kind = ConsensusRegularizer::Kind::kSquaredNorm;
  } else if (reg == "l1") {
    scenario.regularizer.kind = ConsensusRegularizer::Kind::kL1;
  } else {
    throw std::runtime_error("consensus scenario: unknown regularizer " + reg);
  }
  scenario.regularizer.weight = j.value("regularizer_weight", 0.0);

  if (j.contains("agents")) {
    for (const json& a : j.at("agents")) {
      AgentData d;
      const auto rows = a.at("x").get<std::vector<std::vector<double>>>();
      const auto y = a.at("y").get<std::vector<double>>();
      if (rows.size() != y.size()) throw std::runtime_error("consensus scenario: X/y shape mismatch");
      d.x.resize(static_cast<Eigen::Index>(rows.size()),
                 rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
          d.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
      }
      d.y = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
      scenario.data.push_back(std::move(d));
    }
  } else if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    const int dim = s.at("dim").get<int>();
    const int rows_per_agent = s.at("rows_per_agent").get<int>();
    const std::uint64_t seed = s.value("seed", 0ULL);
    Rng rng = make_rng(seed);
    const Eigen::VectorXd truth = normal_vector(rng, dim);
    const double noise = s.value("noise", 0.0);
    for (int n = 0; n < scenario.num_agents; ++n) {
      AgentData d;
      d.x.resize(rows_per_agent, dim);
      d.y.resize(rows_per_agent);
      for (int r = 0; r < rows_per_agent; ++r) {
        d.x.row(r) = normal_vector(rng, dim).transpose();
        d.y(r) = d.x.row(r).dot(truth);
      }
      if (noise > 0.0) d.y += normal_vector(rng, rows_per_agent, 0.0, std::sqrt(noise));
      scenario.data.push_back(std::move(d));
    }
  } else {
    throw std::runtime_error("consensus scenario: need either agents or synthetic data");
  }
  (void)base_dir;
  return scenario;
}

ConsensusScenario load_consensus_scenario(const std::string& path) {
  return parse_consensus_scenario(read_file(path),
                                  std::filesystem::path(path).parent_path().string());
}

}  // namespace radiomap
