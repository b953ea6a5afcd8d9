#include "figures.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "radiomap/kernels.hpp"
#include "radiomap/parametric.hpp"
#include "radiomap/random.hpp"
#include "radiomap/simulator.hpp"
#include "svg.hpp"

namespace radiomap::tools {

namespace {

using namespace radiomap;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Shared 1D scenario: two transmitters on a 100 m segment with mild
/// correlated shadowing, measured in linear power.
struct ToyScenario {
  Environment env;
  Grid grid;
  std::vector<Location> tx_locations;
  GridMap truth;

  explicit ToyScenario(std::uint64_t seed)
      : grid(Region(Location(0.0), Location(100.0)), 200),
        truth(make_truth(env, grid, seed, tx_locations)) {}

  static GridMap make_truth(Environment& env, const Grid& grid, std::uint64_t seed,
                            std::vector<Location>& tx_locations) {
    Transmitter t1, t2;
    t1.location = Location(30.0);
    t1.power_db = 10.0;
    t2.location = Location(75.0);
    t2.power_db = 6.0;
    env.transmitters = {t1, t2};
    env.path_loss_exponent = 2.0;
    env.shadowing = {2.0, 10.0, 0.0};
    env.seed = seed;
    tx_locations = {t1.location, t2.location};
    return true_power_map(env, grid);
  }

  MeasurementSet measurements(int count, std::uint64_t seed) const {
    Rng rng = make_rng(derive_seed(seed, 101));
    std::vector<Location> locs;
    for (int i = 0; i < count; ++i) locs.push_back(Location(uniform_vector(rng, 1, 2.0, 98.0)(0)));
    const double noise = 1e-4;
    return draw_measurements(truth, locs, noise, derive_seed(seed, 102));
  }

  double test_mse(const MapFunction& estimate) const {
    double err = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double e = estimate(grid.point(g)) - truth.at(g);
      err += e * e;
    }
    return err / static_cast<double>(grid.size());
  }
};

std::string curve_csv(const ToyScenario& scenario, const MapFunction& estimate,
                      const MeasurementSet& data) {
  std::ostringstream os;
  os << "x,truth,estimate,is_measurement,measured_value\n";
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    const Location p = scenario.grid.point(g);
    os << num(p[0]) << ',' << num(scenario.truth.at(g)) << ',' << num(estimate(p)) << ",0,\n";
  }
  for (const Measurement& m : data.measurements()) {
    os << num(m.location[0]) << ",,," << "1," << num(m.value) << "\n";
  }
  return os.str();
}

std::string curve_svg(const ToyScenario& scenario, const MapFunction& estimate,
                      const MeasurementSet& data, const std::string& title) {
  Series truth_series{"truth", "#1f77b4", {}, {}, false};
  Series est_series{"estimate", "#d62728", {}, {}, false};
  Series meas_series{"measurements", "#2ca02c", {}, {}, true};
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    const Location p = scenario.grid.point(g);
    truth_series.x.push_back(p[0]);
    truth_series.y.push_back(scenario.truth.at(g));
    est_series.x.push_back(p[0]);
    est_series.y.push_back(estimate(p));
  }
  for (const Measurement& m : data.measurements()) {
    meas_series.x.push_back(m.location[0]);
    meas_series.y.push_back(m.value);
  }
  return render_line_plot({truth_series, est_series, meas_series}, title);
}

FigureOutputs parametric_vs_poly(std::uint64_t seed, bool known_tx) {
  const ToyScenario scenario(seed);
  const MeasurementSet data = scenario.measurements(12, seed);

  MapFunction estimate;
  if (known_tx) {
    const BasisSet basis = friis_basis(scenario.tx_locations, scenario.env.path_loss_exponent,
                                       scenario.grid.cell_diagonal());
    const LinearMapEstimate fit = fit_ls(basis, data);
    estimate = [fit](const Location& x) { return fit.evaluate(x); };
  } else {
    const BasisSet basis = polynomial_basis(13, scenario.grid.region());
    const LinearMapEstimate fit = fit_ls(basis, data);
    estimate = [fit](const Location& x) { return fit.evaluate(x); };
  }

  FigureOutputs out;
  out.csv = curve_csv(scenario, estimate, data);
  out.svg = curve_svg(scenario, estimate, data,
                      known_tx ? "Parametric estimate, known transmitter locations"
                               : "Polynomial fit of degree 13");
  out.metrics["test_mse"] = scenario.test_mse(estimate);
  out.metrics["measurement_count"] = static_cast<double>(data.size());
  return out;
}

FigureOutputs rkhs_sample(std::uint64_t seed) {
  // A function in the RKHS with exactly 5 expansion terms.
  const int terms = 5;
  const Kernel kernel = rbf_kernel(7.0);
  Rng rng = make_rng(derive_seed(seed, 301));
  std::vector<Location> centroids;
  Eigen::VectorXd coeffs(terms);
  for (int i = 0; i < terms; ++i) {
    centroids.push_back(Location(10.0 + 80.0 * (i + uniform_vector(rng, 1)(0) * 0.5) / terms));
    coeffs(i) = normal_vector(rng, 1, 0.0, 1.0)(0);
  }
  const KernelExpansion f(centroids, coeffs, kernel);

  std::ostringstream csv;
  csv << "x,value,is_centroid,coefficient\n";
  const Grid grid(Region(Location(0.0), Location(100.0)), 200);
  Series fn{"rkhs function", "#1f77b4", {}, {}, false};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Location p = grid.point(g);
    csv << num(p[0]) << ',' << num(f.evaluate(p)) << ",0,\n";
    fn.x.push_back(p[0]);
    fn.y.push_back(f.evaluate(p));
  }
  Series marks{"centroids", "#d62728", {}, {}, true};
  for (int i = 0; i < terms; ++i) {
    csv << num(centroids[static_cast<std::size_t>(i)][0]) << ",,1," << num(coeffs(i)) << "\n";
    marks.x.push_back(centroids[static_cast<std::size_t>(i)][0]);
    marks.y.push_back(f.evaluate(centroids[static_cast<std::size_t>(i)]));
  }

  FigureOutputs out;
  out.csv = csv.str();
  out.svg = render_line_plot({fn, marks}, "A 5-term expansion in the RKHS");
  out.metrics["terms"] = terms;
  return out;
}

// The KRR experiments fit the dB map: the log domain is where the
// spatial structure is smooth enough for an RBF of moderate width.
struct KrrFitPieces {
  GridMap truth_db;
  MeasurementSet data;
  KernelExpansion fit;
};

KrrFitPieces krr_pieces(const ToyScenario& scenario, std::uint64_t seed, int count) {
  GridMap truth_db = scenario.truth.to_db();
  Rng rng = make_rng(derive_seed(seed, 101));
  std::vector<Location> locs;
  for (int i = 0; i < count; ++i) locs.push_back(Location(uniform_vector(rng, 1, 2.0, 98.0)(0)));
  MeasurementSet data = draw_measurements(truth_db, locs, 0.25, derive_seed(seed, 102));
  KernelExpansion fit = fit_krr(rbf_kernel(6.0), data, 1e-4);
  return {std::move(truth_db), std::move(data), std::move(fit)};
}

FigureOutputs krr_figure(std::uint64_t seed, int count, const std::string& title) {
  const ToyScenario scenario(seed);
  const KrrFitPieces pieces = krr_pieces(scenario, seed, count);
  const MapFunction estimate = [&](const Location& x) { return pieces.fit.evaluate(x); };

  // Curves in dB against the dB truth.
  std::ostringstream csv;
  csv << "x,truth_db,estimate_db,is_measurement,measured_value_db\n";
  Series truth_series{"truth (dB)", "#1f77b4", {}, {}, false};
  Series est_series{"estimate (dB)", "#d62728", {}, {}, false};
  Series meas_series{"measurements", "#2ca02c", {}, {}, true};
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    const Location p = scenario.grid.point(g);
    csv << num(p[0]) << ',' << num(pieces.truth_db.at(g)) << ',' << num(estimate(p)) << ",0,\n";
    truth_series.x.push_back(p[0]);
    truth_series.y.push_back(pieces.truth_db.at(g));
    est_series.x.push_back(p[0]);
    est_series.y.push_back(estimate(p));
  }
  for (const Measurement& m : pieces.data.measurements()) {
    csv << num(m.location[0]) << ",,," << "1," << num(m.value) << "\n";
    meas_series.x.push_back(m.location[0]);
    meas_series.y.push_back(m.value);
  }

  double err = 0.0;
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    const double e = estimate(scenario.grid.point(g)) - pieces.truth_db.at(g);
    err += e * e;
  }

  FigureOutputs out;
  out.csv = csv.str();
  out.svg = render_line_plot({truth_series, est_series, meas_series}, title);
  out.metrics["test_mse"] = err / static_cast<double>(scenario.grid.size());
  out.metrics["measurement_count"] = static_cast<double>(count);
  return out;
}

}  // namespace

double figure_krr_mse(std::uint64_t seed, int measurement_count) {
  const ToyScenario scenario(seed);
  const KrrFitPieces pieces = krr_pieces(scenario, seed, measurement_count);
  double err = 0.0;
  for (std::size_t g = 0; g < scenario.grid.size(); ++g) {
    const double e = pieces.fit.evaluate(scenario.grid.point(g)) - pieces.truth_db.at(g);
    err += e * e;
  }
  return err / static_cast<double>(scenario.grid.size());
}

FigureOutputs make_figure(const std::string& name, std::uint64_t seed) {
  if (name == "fig1") return parametric_vs_poly(seed, true);
  if (name == "fig2") return parametric_vs_poly(seed, false);
  if (name == "fig3") return rkhs_sample(seed);
  if (name == "fig4") return krr_figure(seed, 12, "KRR estimate");
  if (name == "fig5") return krr_figure(seed, 24, "KRR estimate, doubled measurements");
  throw std::invalid_argument("unknown figure name: " + name);
}

}  // namespace radiomap::tools
