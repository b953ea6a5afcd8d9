#include "radiomap/parametric.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "radiomap/linalg.hpp"

namespace radiomap {

BasisSet::BasisSet(std::vector<MapFunction> functions, std::vector<std::string> labels)
    : functions_(std::move(functions)), labels_(std::move(labels)) {
  if (labels_.size() != functions_.size()) {
    throw std::invalid_argument("BasisSet: label count must match function count");
  }
}

Eigen::MatrixXd BasisSet::design_matrix(const std::vector<Location>& locations) const {
  Eigen::MatrixXd psi(static_cast<Eigen::Index>(locations.size()), static_cast<Eigen::Index>(size()));
  for (std::size_t n = 0; n < locations.size(); ++n) {
    for (std::size_t b = 0; b < size(); ++b) {
      psi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(b)) = functions_[b](locations[n]);
    }
  }
  return psi;
}

BasisSet friis_basis(const std::vector<Location>& tx_locations, double exponent, double min_distance) {
  if (tx_locations.empty()) throw std::invalid_argument("friis_basis: empty transmitter list");
  std::vector<MapFunction> fns;
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < tx_locations.size(); ++s) {
    const Location tx = tx_locations[s];
    fns.push_back([tx, exponent, min_distance](const Location& x) {
      const double d = std::max(distance(tx, x), min_distance);
      return 1.0 / std::pow(d, exponent);
    });
    labels.push_back("tx" + std::to_string(s));
  }
  return BasisSet(std::move(fns), std::move(labels));
}

BasisSet polynomial_basis(int degree, const Region& region) {
  if (degree < 0) throw std::invalid_argument("polynomial_basis: degree must be >= 0");
  if (region.dim() != 1) throw std::invalid_argument("polynomial_basis: 1D regions only");
  const double lo = region.lower[0];
  const double span = region.extent(0);
  std::vector<MapFunction> fns;
  std::vector<std::string> labels;
  for (int b = 0; b <= degree; ++b) {
    fns.push_back([lo, span, b](const Location& x) {
      const double t = span > 0.0 ? 2.0 * (x[0] - lo) / span - 1.0 : 0.0;
      return std::pow(t, b);
    });
    labels.push_back("x^" + std::to_string(b));
  }
  return BasisSet(std::move(fns), std::move(labels));
}

double LinearMapEstimate::evaluate(const Location& loc) const {
  double v = 0.0;
  for (std::size_t b = 0; b < basis.size(); ++b) {
    v += coefficients(static_cast<Eigen::Index>(b)) * basis.evaluate(b, loc);
  }
  return v;
}

std::vector<std::size_t> LinearMapEstimate::support() const {
  std::vector<std::size_t> s;
  for (Eigen::Index b = 0; b < coefficients.size(); ++b) {
    if (std::abs(coefficients(b)) > 1e-10) s.push_back(static_cast<std::size_t>(b));
  }
  return s;
}

LinearMapEstimate fit_ls(const BasisSet& basis, const MeasurementSet& data) {
  if (data.empty()) throw std::invalid_argument("fit_ls: need at least one measurement");
  const Eigen::MatrixXd psi = basis.design_matrix(data.locations());
  const Eigen::VectorXd m =
      Eigen::Map<const Eigen::VectorXd>(data.values().data(), static_cast<Eigen::Index>(data.size()));

  LinearMapEstimate est;
  est.basis = basis;
  if (psi.cwiseAbs().maxCoeff() == 0.0) {
    est.coefficients = Eigen::VectorXd::Zero(psi.cols());
    est.zero_design_warning = true;
    return est;
  }
  // Minimum-norm least squares (pseudoinverse semantics).
  est.coefficients = psi.completeOrthogonalDecomposition().solve(m);
  return est;
}

double lasso_objective(const BasisSet& basis, const MeasurementSet& data, double lambda,
                       const Eigen::VectorXd& coefficients) {
  const Eigen::MatrixXd psi = basis.design_matrix(data.locations());
  const Eigen::VectorXd m =
      Eigen::Map<const Eigen::VectorXd>(data.values().data(), static_cast<Eigen::Index>(data.size()));
  return (m - psi * coefficients).squaredNorm() + lambda * coefficients.lpNorm<1>();
}

LinearMapEstimate fit_lasso(const Grid& grid, const MeasurementSet& data, double lambda,
                            double exponent, double min_distance, double tolerance,
                            int max_iterations) {
  if (lambda < 0.0) throw std::invalid_argument("fit_lasso: lambda must be nonnegative");
  if (data.empty()) throw std::invalid_argument("fit_lasso: need at least one measurement");

  if (min_distance <= 0.0) {
    // Half the smallest cell size: keeps the design matrix bounded when
    // a sensor sits on a grid point, yet leaves neighboring atoms
    // distinguishable (a full cell would flatten them into near-equal
    // columns).
    min_distance = 0.5 * grid.cell_size(0);
    for (int a = 1; a < grid.dim(); ++a) min_distance = std::min(min_distance, 0.5 * grid.cell_size(a));
  }
  BasisSet basis = friis_basis(grid_points(grid), exponent, min_distance);
  const Eigen::MatrixXd psi = basis.design_matrix(data.locations());
  const Eigen::VectorXd m =
      Eigen::Map<const Eigen::VectorXd>(data.values().data(), static_cast<Eigen::Index>(data.size()));

  if (lambda == 0.0) {
    // Degenerate case: plain least squares. Gradient descent from zero
    // converges to the minimum-norm solution, which the direct solve
    // reaches immediately.
    LinearMapEstimate est;
    est.coefficients = psi.completeOrthogonalDecomposition().solve(m);
    est.basis = std::move(basis);
    return est;
  }

  // ISTA on ||m - Psi a||^2 + lambda ||a||_1 with backtracking steps.
  const double lipschitz = 2.0 * spectral_norm(psi) * spectral_norm(psi);
  double step = lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
  const double grad_scale = std::max(1.0, (2.0 * psi.transpose() * m).cwiseAbs().maxCoeff());

  Eigen::VectorXd a = Eigen::VectorXd::Zero(psi.cols());
  bool converged = false;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd residual = psi * a - m;
    const Eigen::VectorXd grad = 2.0 * psi.transpose() * residual;
    const double smooth = residual.squaredNorm();

    Eigen::VectorXd next;
    while (true) {
      next = soft_threshold(a - step * grad, lambda * step);
      const Eigen::VectorXd diff = next - a;
      const double smooth_next = (psi * next - m).squaredNorm();
      const double bound = smooth + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (smooth_next <= bound + 1e-15 * std::abs(bound) || step < 1e-18) break;
      step *= 0.5;
    }
    a = next;

    if (it % 10 == 0 || it == max_iterations - 1) {
      // Subgradient stationarity of the composite objective.
      const Eigen::VectorXd g = 2.0 * psi.transpose() * (psi * a - m);
      double r = 0.0;
      for (Eigen::Index b = 0; b < a.size(); ++b) {
        const double v = a(b) != 0.0 ? std::abs(g(b) + lambda * (a(b) > 0.0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(g(b)) - lambda);
        r = std::max(r, v);
      }
      if (r <= tolerance * grad_scale) {
        converged = true;
        ++it;
        break;
      }
    }
  }

  LinearMapEstimate est;
  est.basis = std::move(basis);
  est.coefficients = std::move(a);
  est.converged = converged;
  return est;
}

}  // namespace radiomap
