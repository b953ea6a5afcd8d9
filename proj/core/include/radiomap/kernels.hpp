#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "radiomap/map_function.hpp"

namespace radiomap {

/// Reproducing kernel: symmetric, positive-definite on distinct points.
class Kernel {
 public:
  using Fn = std::function<double(const Location&, const Location&)>;

  Kernel() = default;
  Kernel(Fn fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}

  double operator()(const Location& a, const Location& b) const { return fn_(a, b); }
  const std::string& name() const { return name_; }

 private:
  Fn fn_;
  std::string name_;
};

/// Gaussian RBF kernel exp(-||x-x'||^2 / (2 sigma^2)).
Kernel rbf_kernel(double sigma);

/// Gram matrix with exact symmetry enforced.
Eigen::MatrixXd gram(const Kernel& kernel, const std::vector<Location>& points);

/// Finite kernel expansion sum_n alpha_n k(x, x_n).
class KernelExpansion {
 public:
  KernelExpansion() = default;
  KernelExpansion(std::vector<Location> centroids, Eigen::VectorXd coefficients, Kernel kernel);

  double evaluate(const Location& loc) const;
  double operator()(const Location& loc) const { return evaluate(loc); }

  const std::vector<Location>& centroids() const { return centroids_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const Kernel& kernel() const { return kernel_; }

 private:
  std::vector<Location> centroids_;
  Eigen::VectorXd coefficients_;
  Kernel kernel_;
};

/// Kernel ridge regression: solves (K + lambda N I) alpha = m. The
/// expansion centroids are the measurement locations, in order.
/// Requires lambda > 0 when the Gram matrix is singular (e.g. repeated
/// locations).
KernelExpansion fit_krr(const Kernel& kernel, const MeasurementSet& data, double lambda);

/// sqrt(alpha^T K alpha), clamped at zero against round-off.
double rkhs_norm(const KernelExpansion& expansion);

/// (1/N) sum (m_n - f(x_n))^2 + lambda * ||f||_H^2.
double krr_objective(const Kernel& kernel, const MeasurementSet& data, double lambda,
                     const KernelExpansion& expansion);

/// FitFunction adapter for composite estimators (per-frequency, BEM).
FitFunction krr_fit(Kernel kernel, double lambda);

}  // namespace radiomap
