#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radiomap/gridmap.hpp"
#include "radiomap/kriging.hpp"

namespace radiomap {

/// Posterior variance of the fitted estimator at every grid point.
GridMap uncertainty_map(const KrigingEstimate& estimate, const Grid& grid);

/// Next measurement location: argmax over grid points of
/// posterior_variance(x) - travel_weight * ||x - current||, ties to the
/// lowest grid index.
std::size_t plan_next(const KrigingEstimate& estimate, const Grid& grid, const Location& current,
                      double travel_weight);

struct SurveyStep {
  std::size_t grid_index = 0;
  Location location;
  double mse = 0.0;
  double total_variance = 0.0;
};

struct SurveyResult {
  MeasurementSet measurements;
  std::vector<SurveyStep> steps;
};

/// Greedy uncertainty-driven loop: plan, measure the ground truth with
/// noise, refit, record error against the truth.
SurveyResult run_survey(const GridMap& truth_db, const CovarianceModel& model, double noise_variance,
                        const Location& start, int budget, double travel_weight, std::uint64_t seed);

/// Naive boustrophedon sweep baseline over the same grid and budget.
SurveyResult run_grid_sweep(const GridMap& truth_db, const CovarianceModel& model,
                            double noise_variance, int budget, std::uint64_t seed);

/// Trajectory CSV `step,x,y,z,mse,total_variance`.
void save_trajectory(const SurveyResult& result, const std::string& path);

}  // namespace radiomap
