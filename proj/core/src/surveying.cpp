#include "radiomap/surveying.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <stdexcept>

#include "radiomap/random.hpp"

namespace radiomap {

GridMap uncertainty_map(const KrigingEstimate& estimate, const Grid& grid) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    values(static_cast<Eigen::Index>(g)) = estimate.posterior_variance(grid.point(g));
  }
  return GridMap(grid, std::move(values), Unit::kDb);
}

std::size_t plan_next(const KrigingEstimate& estimate, const Grid& grid, const Location& current,
                      double travel_weight) {
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Location p = grid.point(g);
    const double score = estimate.posterior_variance(p) - travel_weight * distance(p, current);
    if (score > best_score) {  // strict: ties resolve to the lowest index
      best_score = score;
      best = g;
    }
  }
  return best;
}

namespace {

GridMap estimate_map(const KrigingEstimate& estimate, const Grid& grid) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    values(static_cast<Eigen::Index>(g)) = estimate.evaluate(grid.point(g));
  }
  return GridMap(grid, std::move(values), Unit::kDb);
}

SurveyResult run_with_plan(const GridMap& truth_db, const CovarianceModel& model,
                           double noise_variance, int budget, std::uint64_t seed,
                           const std::function<std::size_t(const KrigingEstimate*, const Location&,
                                                           int)>& next_index,
                           Location start) {
  if (budget < 1) throw std::invalid_argument("survey: budget must be >= 1");
  const Grid& grid = truth_db.grid();
  Rng rng = make_rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_variance));

  SurveyResult result;
  result.measurements = MeasurementSet({}, noise_variance, Unit::kDb);
  std::unique_ptr<KrigingEstimate> fitted;
  Location current = start;

  for (int step = 0; step < budget; ++step) {
    const std::size_t g = next_index(fitted.get(), current, step);
    const Location loc = grid.point(g);
    Measurement m;
    m.location = loc;
    m.value = truth_db.at(g) + (noise_variance > 0.0 ? noise(rng) : 0.0);
    result.measurements.append(std::move(m));
    current = loc;

    fitted = std::make_unique<KrigingEstimate>(model, result.measurements, false);

    const GridMap est = estimate_map(*fitted, grid);
    const GridMap unc = uncertainty_map(*fitted, grid);
    SurveyStep record;
    record.grid_index = g;
    record.location = loc;
    record.mse = mse(est, truth_db);
    record.total_variance = unc.values().sum();
    result.steps.push_back(record);
  }
  return result;
}

}  // namespace

SurveyResult run_survey(const GridMap& truth_db, const CovarianceModel& model, double noise_variance,
                        const Location& start, int budget, double travel_weight, std::uint64_t seed) {
  const Grid& grid = truth_db.grid();
  auto plan = [&](const KrigingEstimate* fitted, const Location& current, int) {
    if (fitted != nullptr) return plan_next(*fitted, grid, current, travel_weight);
    // No data yet: the posterior variance is the constant prior, so the
    // greedy rule reduces to the travel term alone.
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double score = -travel_weight * distance(grid.point(g), current);
      if (score > best_score) {
        best_score = score;
        best = g;
      }
    }
    return best;
  };
  return run_with_plan(truth_db, model, noise_variance, budget, seed, plan, start);
}

SurveyResult run_grid_sweep(const GridMap& truth_db, const CovarianceModel& model,
                            double noise_variance, int budget, std::uint64_t seed) {
  const Grid& grid = truth_db.grid();
  // Boustrophedon order: even rows left-to-right, odd rows reversed.
  std::vector<std::size_t> order;
  order.reserve(grid.size());
  const int rows = grid.count(0);
  const int cols = grid.dim() >= 2 ? grid.count(1) : 1;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int jj = (i % 2 == 0) ? j : cols - 1 - j;
      if (grid.dim() == 1) {
        order.push_back(static_cast<std::size_t>(i));
      } else {
        const std::array<int, 2> mi{i, jj};
        order.push_back(grid.linear_index(std::span<const int>(mi.data(), 2)));
      }
    }
    if (grid.dim() == 1) break;
  }
  if (grid.dim() == 1) {
    order.clear();
    for (std::size_t g = 0; g < grid.size(); ++g) order.push_back(g);
  }
  auto plan = [&](const KrigingEstimate*, const Location&, int step) {
    return order[static_cast<std::size_t>(step) % order.size()];
  };
  return run_with_plan(truth_db, model, noise_variance, budget, seed, plan, grid.point(order[0]));
}

void save_trajectory(const SurveyResult& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "step,x,y,z,mse,total_variance\n";
  char buf[32];
  int step = 1;
  for (const SurveyStep& s : result.steps) {
    os << step++;
    for (int a = 0; a < 3; ++a) {
      os << ',';
      if (a < s.location.dim()) {
        std::snprintf(buf, sizeof buf, "%.17g", s.location[a]);
        os << buf;
      }
    }
    std::snprintf(buf, sizeof buf, "%.17g", s.mse);
    os << ',' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", s.total_variance);
    os << ',' << buf << "\n";
  }
}

}  // namespace radiomap
