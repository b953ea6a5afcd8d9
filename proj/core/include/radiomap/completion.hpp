#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "radiomap/gridmap.hpp"
#include "radiomap/measurement.hpp"

namespace radiomap {

/// Partially observed power-map matrix on a 2D grid.
struct PartialGridObservation {
  Grid grid;  // 2D
  std::vector<std::pair<int, int>> observed;  // unique (i, j) indices
  Eigen::VectorXd values;                     // aligned with observed
  Unit unit = Unit::kDb;
};

/// Bins measurements to their nearest grid point; co-binned values are
/// averaged. Throws on an empty measurement set.
PartialGridObservation from_measurements(const Grid& grid, const MeasurementSet& data);

/// Singular value soft-thresholding: shrinks every singular value by
/// tau, keeping the factors.
Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau);

struct CompletionResult {
  GridMap map;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_history;
};

/// Nuclear-norm-regularized completion
///   minimize 1/2 sum_O (P_ij - M_ij)^2 + lambda ||P||_*
/// by proximal gradient with unit step (the masked quadratic is
/// 1-Lipschitz), iterated to relative objective change <= tolerance.
CompletionResult complete(const PartialGridObservation& obs, double lambda,
                          double tolerance = 1e-9, int max_iterations = 10000);

double completion_objective(const PartialGridObservation& obs, double lambda,
                            const Eigen::MatrixXd& p);

}  // namespace radiomap
