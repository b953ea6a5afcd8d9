#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "radiomap/map_function.hpp"

namespace radiomap {

/// Ordered collection of scalar basis functions over the region.
class BasisSet {
 public:
  BasisSet() = default;
  BasisSet(std::vector<MapFunction> functions, std::vector<std::string> labels);

  std::size_t size() const { return functions_.size(); }
  double evaluate(std::size_t b, const Location& loc) const { return functions_[b](loc); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Design matrix with (n, b) = psi_b(x_n).
  Eigen::MatrixXd design_matrix(const std::vector<Location>& locations) const;

 private:
  std::vector<MapFunction> functions_;
  std::vector<std::string> labels_;
};

/// One inverse-power-law function 1/max(d, min_distance)^exponent per
/// transmitter location.
BasisSet friis_basis(const std::vector<Location>& tx_locations, double exponent,
                     double min_distance = 1e-9);

/// Monomials over a 1D region, inputs rescaled affinely to [-1, 1].
BasisSet polynomial_basis(int degree, const Region& region);

struct LinearMapEstimate {
  BasisSet basis;
  Eigen::VectorXd coefficients;
  bool zero_design_warning = false;
  bool converged = true;

  double evaluate(const Location& loc) const;
  double operator()(const Location& loc) const { return evaluate(loc); }
  /// Indices with |coefficient| > 1e-10.
  std::vector<std::size_t> support() const;
};

/// Minimum-norm least squares fit of m = Psi alpha.
LinearMapEstimate fit_ls(const BasisSet& basis, const MeasurementSet& data);

/// Lasso over a Friis basis anchored at every grid point, solved by
/// proximal gradient (ISTA with backtracking). Nonzero coefficients
/// mark candidate transmitter cells. min_distance <= 0 selects half
/// the smallest cell size, keeping the design matrix conditioned when
/// a sensor sits on a grid point.
LinearMapEstimate fit_lasso(const Grid& grid, const MeasurementSet& data, double lambda,
                            double exponent, double min_distance = 0.0,
                            double tolerance = 1e-8, int max_iterations = 100000);

/// ||m - Psi alpha||^2 + lambda ||alpha||_1 for a candidate solution.
double lasso_objective(const BasisSet& basis, const MeasurementSet& data, double lambda,
                       const Eigen::VectorXd& coefficients);

}  // namespace radiomap
