#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "figures.hpp"
#include "radiomap/consensus.hpp"
#include "radiomap/kernels.hpp"
#include "radiomap/kriging.hpp"
#include "radiomap/parametric.hpp"
#include "radiomap/random.hpp"
#include "radiomap/scenario.hpp"
#include "radiomap/simulator.hpp"
#include "radiomap/surveying.hpp"

namespace {

using namespace radiomap;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
}

std::vector<Location> seeded_locations(const Grid& grid, int count, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, 7));
  std::vector<Location> locs;
  for (int i = 0; i < count; ++i) {
    std::array<double, 3> c{};
    for (int a = 0; a < grid.dim(); ++a) {
      c[static_cast<std::size_t>(a)] =
          uniform_vector(rng, 1, grid.region().lower[a], grid.region().upper[a])(0);
    }
    locs.push_back(Location(std::span<const double>(c.data(), static_cast<std::size_t>(grid.dim()))));
  }
  return locs;
}

struct EstimateConfig {
  std::string scenario_path;
  std::string estimator = "krr";
  std::string measurements_path;
  int count = 20;
  double noise = 0.0;
  std::map<std::string, double> hyper;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

double hyper_or(const EstimateConfig& cfg, const std::string& key, double fallback) {
  const auto it = cfg.hyper.find(key);
  return it == cfg.hyper.end() ? fallback : it->second;
}

int cmd_estimate(const EstimateConfig& cfg) {
  const Scenario scenario = load_scenario(cfg.scenario_path);
  const GridMap truth = true_power_map(scenario.environment, scenario.grid);
  const GridMap truth_db = truth.to_db();

  MeasurementSet data({}, cfg.noise, Unit::kDb);
  if (!cfg.measurements_path.empty()) {
    data = load_measurements(cfg.measurements_path, cfg.noise, Unit::kDb);
  } else {
    data = draw_measurements(truth_db, seeded_locations(scenario.grid, cfg.count, cfg.seed),
                             cfg.noise, derive_seed(cfg.seed, 11));
  }

  // All built-in estimators work on dB values; outputs convert at the end.
  MapFunction estimate;
  bool converged = true;
  if (cfg.estimator == "krr") {
    const Kernel kernel = rbf_kernel(hyper_or(cfg, "sigma", 6.0));
    const KernelExpansion fit = fit_krr(kernel, data, hyper_or(cfg, "lambda", 1e-4));
    estimate = [fit](const Location& x) { return fit.evaluate(x); };
  } else if (cfg.estimator == "kriging") {
    const CovarianceModel model =
        build_covariance(scenario.environment.shadowing, scenario.environment.fading,
                         [&](const Location&) { return hyper_or(cfg, "mean_db", 0.0); });
    const KrigingEstimate fit = fit_kriging(model, data);
    estimate = [fit](const Location& x) { return fit.evaluate(x); };
  } else if (cfg.estimator == "parametric") {
    std::vector<Location> txs;
    for (const Transmitter& tx : scenario.environment.transmitters) txs.push_back(tx.location);
    const BasisSet basis = friis_basis(txs, scenario.environment.path_loss_exponent,
                                       scenario.grid.cell_diagonal());
    // The linear model lives in natural units.
    std::vector<Measurement> linear;
    for (const Measurement& m : data.measurements()) {
      Measurement lm = m;
      lm.value = db_to_linear(m.value);
      linear.push_back(std::move(lm));
    }
    const LinearMapEstimate fit =
        fit_ls(basis, MeasurementSet(std::move(linear), cfg.noise, Unit::kLinearWatts));
    estimate = [fit](const Location& x) { return linear_to_db(std::max(fit.evaluate(x), 1e-30)); };
  } else if (cfg.estimator == "lasso") {
    std::vector<Measurement> linear;
    for (const Measurement& m : data.measurements()) {
      Measurement lm = m;
      lm.value = db_to_linear(m.value);
      linear.push_back(std::move(lm));
    }
    const LinearMapEstimate fit = fit_lasso(
        scenario.grid, MeasurementSet(std::move(linear), cfg.noise, Unit::kLinearWatts),
        hyper_or(cfg, "lambda", 1e-3), scenario.environment.path_loss_exponent,
        scenario.grid.cell_diagonal());
    converged = fit.converged;
    estimate = [fit](const Location& x) { return linear_to_db(std::max(fit.evaluate(x), 1e-30)); };
  } else {
    std::cerr << "unknown estimator: " << cfg.estimator << "\n";
    return kExitValidation;
  }

  Eigen::VectorXd values(static_cast<Eigen::Index>(scenario.grid.size()));
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    values(static_cast<Eigen::Index>(g)) = estimate(scenario.grid.point(g));
  }
  const GridMap estimated(scenario.grid, std::move(values), Unit::kDb);

  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);
  save_gridmap(estimated, (out / "estimate.map").string());
  save_measurements(data, (out / "measurements.csv").string());

  json metrics;
  metrics["schema"] = "radiomap.metrics.v1";
  metrics["estimator"] = cfg.estimator;
  metrics["seed"] = cfg.seed;
  metrics["measurement_count"] = data.size();
  metrics["mse_db"] = mse(estimated, truth_db);
  metrics["mae_db"] = mae(estimated, truth_db);
  metrics["converged"] = converged;
  write_text(out / "metrics.json", metrics.dump(2) + "\n");

  return converged ? kExitOk : kExitNoConvergence;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, int count,
                 double noise, std::uint64_t seed) {
  const Scenario scenario = load_scenario(scenario_path);
  const GridMap truth = true_power_map(scenario.environment, scenario.grid);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  save_gridmap(truth, (out / "truth.map").string());
  save_gridmap(truth.to_db(), (out / "truth_db.map").string());
  if (count > 0) {
    const MeasurementSet data = draw_measurements(
        truth.to_db(), seeded_locations(scenario.grid, count, seed), noise, derive_seed(seed, 11));
    save_measurements(data, (out / "measurements.csv").string());
  }
  return kExitOk;
}

int cmd_survey(const std::string& scenario_path, const std::string& out_dir, int budget,
               double travel_weight, double noise, std::uint64_t seed) {
  const Scenario scenario = load_scenario(scenario_path);
  const GridMap truth_db = true_power_map(scenario.environment, scenario.grid).to_db();
  if (scenario.environment.transmitters.empty()) return kExitValidation;
  const Transmitter& tx = scenario.environment.transmitters.front();
  const CovarianceModel model = build_covariance(
      scenario.environment.shadowing, scenario.environment.fading,
      path_loss_mean(tx.location, tx.power_db, scenario.environment.path_loss_exponent,
                     scenario.grid.cell_diagonal(), scenario.environment.shadowing,
                     scenario.environment.fading));
  const SurveyResult result = run_survey(truth_db, model, noise,
                                         scenario.grid.point(0), budget, travel_weight, seed);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  save_trajectory(result, (out / "trajectory.csv").string());
  save_measurements(result.measurements, (out / "measurements.csv").string());
  return kExitOk;
}

int cmd_admm(const std::string& scenario_path, const std::string& out_dir) {
  const ConsensusScenario scenario = load_consensus_scenario(scenario_path);
  const ConsensusProblem problem(scenario.num_agents, scenario.edges, scenario.regularizer,
                                 scenario.rho);
  const ConsensusResult result =
      run_to_consensus(problem, scenario.data, scenario.tol, scenario.max_rounds);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  std::ostringstream csv;
  csv << "round,max_disagreement,max_change\n";
  for (std::size_t r = 0; r < result.disagreement_history.size(); ++r) {
    csv << (r + 1) << ',' << fmt(result.disagreement_history[r]) << ','
        << fmt(result.change_history[r]) << "\n";
  }
  write_text(out / "convergence.csv", csv.str());

  json summary;
  summary["schema"] = "radiomap.admm.v1";
  summary["rounds"] = result.rounds;
  summary["converged"] = result.converged;
  json thetas = json::array();
  for (const Eigen::VectorXd& t : result.thetas) {
    json row = json::array();
    for (Eigen::Index i = 0; i < t.size(); ++i) row.push_back(t(i));
    thetas.push_back(std::move(row));
  }
  summary["thetas"] = std::move(thetas);
  write_text(out / "result.json", summary.dump(2) + "\n");
  return result.converged ? kExitOk : kExitNoConvergence;
}

int cmd_figures(const std::string& name, const std::string& out_dir, std::uint64_t seed) {
  std::vector<std::string> names;
  if (name == "all") {
    names = {"fig1", "fig2", "fig3", "fig4", "fig5"};
  } else {
    names = {name};
  }
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  json metrics;
  metrics["schema"] = "radiomap.figures.v1";
  for (const std::string& fig : names) {
    const tools::FigureOutputs outputs = tools::make_figure(fig, seed);
    write_text(out / (fig + ".csv"), outputs.csv);
    write_text(out / (fig + ".svg"), outputs.svg);
    for (const auto& [key, value] : outputs.metrics) metrics[fig][key] = value;
  }
  write_text(out / "metrics.json", metrics.dump(2) + "\n");
  return kExitOk;
}

int cmd_eval(const std::string& estimate_path, const std::string& truth_path,
             const std::string& out_path) {
  const GridMap estimate = load_gridmap(estimate_path);
  GridMap truth = load_gridmap(truth_path);
  if (truth.unit() != estimate.unit()) {
    truth = estimate.unit() == Unit::kDb ? truth.to_db() : truth.to_linear();
  }
  json metrics;
  metrics["schema"] = "radiomap.metrics.v1";
  metrics["mse"] = mse(estimate, truth);
  metrics["mae"] = mae(estimate, truth);
  const std::string text = metrics.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radiomap: spectrum cartography experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string scenario_path;
  app.add_option("--seed", seed, "PRNG seed shared by all commands")->capture_default_str();
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--scenario", scenario_path, "scenario JSON file");

  auto* simulate = app.add_subcommand("simulate", "write the ground-truth map of a scenario");
  int sim_count = 0;
  double sim_noise = 0.0;
  simulate->add_option("--count", sim_count, "also draw this many measurements");
  simulate->add_option("--noise", sim_noise, "measurement noise variance (dB^2)");

  auto* estimate = app.add_subcommand("estimate", "fit an estimator and write the map + metrics");
  EstimateConfig cfg;
  estimate->add_option("--estimator", cfg.estimator, "krr | kriging | parametric | lasso")
      ->capture_default_str();
  estimate->add_option("--measurements", cfg.measurements_path, "measurement CSV (dB values)");
  estimate->add_option("--count", cfg.count, "number of seeded measurements")->capture_default_str();
  estimate->add_option("--noise", cfg.noise, "measurement noise variance (dB^2)");
  std::vector<std::string> hyper_kv;
  estimate->add_option("--hyper", hyper_kv, "estimator hyperparameter key=value (repeatable)");

  auto* survey = app.add_subcommand("survey", "run the uncertainty-driven measurement loop");
  int budget = 16;
  double travel_weight = 0.1;
  double survey_noise = 0.0;
  survey->add_option("--budget", budget, "measurement budget")->capture_default_str();
  survey->add_option("--travel-weight", travel_weight, "travel cost weight")->capture_default_str();
  survey->add_option("--noise", survey_noise, "measurement noise variance (dB^2)");

  auto* admm = app.add_subcommand("admm", "run a consensus regression scenario");

  auto* figures = app.add_subcommand("figures", "reproduce the 1D toy experiments");
  std::string figure_name = "all";
  figures->add_option("name", figure_name, "fig1..fig5 or all")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "compare two grid maps");
  std::string eval_estimate, eval_truth, eval_out;
  eval->add_option("estimate", eval_estimate, "estimated map file")->required();
  eval->add_option("truth", eval_truth, "reference map file")->required();
  eval->add_option("--metrics-out", eval_out, "write metrics JSON here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (scenario_path.empty()) throw std::invalid_argument("--scenario is required");
      return cmd_simulate(scenario_path, out_dir, sim_count, sim_noise, seed);
    }
    if (estimate->parsed()) {
      if (scenario_path.empty()) throw std::invalid_argument("--scenario is required");
      cfg.scenario_path = scenario_path;
      cfg.out_dir = out_dir;
      cfg.seed = seed;
      for (const std::string& kv : hyper_kv) {
        const auto pos = kv.find('=');
        if (pos == std::string::npos) throw std::invalid_argument("--hyper expects key=value");
        cfg.hyper[kv.substr(0, pos)] = std::stod(kv.substr(pos + 1));
      }
      return cmd_estimate(cfg);
    }
    if (survey->parsed()) {
      if (scenario_path.empty()) throw std::invalid_argument("--scenario is required");
      return cmd_survey(scenario_path, out_dir, budget, travel_weight, survey_noise, seed);
    }
    if (admm->parsed()) {
      if (scenario_path.empty()) throw std::invalid_argument("--scenario is required");
      return cmd_admm(scenario_path, out_dir);
    }
    if (figures->parsed()) {
      return cmd_figures(figure_name, out_dir, seed);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_estimate, eval_truth, eval_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
