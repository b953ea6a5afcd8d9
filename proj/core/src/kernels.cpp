#include "radiomap/kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace radiomap {

Kernel rbf_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("rbf_kernel: sigma must be positive");
  const double denom = 2.0 * sigma * sigma;
  return Kernel(
      [denom](const Location& a, const Location& b) {
        const double d = distance(a, b);
        return std::exp(-d * d / denom);
      },
      "rbf");
}

Eigen::MatrixXd gram(const Kernel& kernel, const std::vector<Location>& points) {
  if (points.empty()) throw std::invalid_argument("gram: empty point set");
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    }
  }
  // Exact symmetry: average the two evaluation orders.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double upper =
          kernel(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      k(i, j) = 0.5 * (k(j, i) + upper);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

KernelExpansion::KernelExpansion(std::vector<Location> centroids, Eigen::VectorXd coefficients,
                                 Kernel kernel)
    : centroids_(std::move(centroids)), coefficients_(std::move(coefficients)), kernel_(std::move(kernel)) {
  if (static_cast<Eigen::Index>(centroids_.size()) != coefficients_.size()) {
    throw std::invalid_argument("KernelExpansion: centroid/coefficient length mismatch");
  }
}

double KernelExpansion::evaluate(const Location& loc) const {
  double v = 0.0;
  for (std::size_t n = 0; n < centroids_.size(); ++n) {
    v += coefficients_(static_cast<Eigen::Index>(n)) * kernel_(loc, centroids_[n]);
  }
  return v;
}

KernelExpansion fit_krr(const Kernel& kernel, const MeasurementSet& data, double lambda) {
  if (data.empty()) throw std::invalid_argument("fit_krr: need at least one measurement");
  if (lambda < 0.0) throw std::invalid_argument("fit_krr: lambda must be nonnegative");
  const std::vector<Location> locs = data.locations();
  const Eigen::Index n = static_cast<Eigen::Index>(locs.size());
  Eigen::MatrixXd k = gram(kernel, locs);
  k.diagonal().array() += lambda * static_cast<double>(n);

  const Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(data.values().data(), n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
  Eigen::VectorXd alpha;
  double residual = 1.0;
  if (ldlt.info() == Eigen::Success) {
    alpha = ldlt.solve(m);
    residual = (k * alpha - m).norm();
    for (int refine = 0; refine < 3 && residual > 1e-10 * std::max(m.norm(), 1e-300); ++refine) {
      alpha += ldlt.solve(m - k * alpha);
      residual = (k * alpha - m).norm();
    }
  }
  if (residual > 1e-9 * std::max(m.norm(), 1e-300)) {
    if (lambda == 0.0) {
      throw std::invalid_argument(
          "fit_krr: Gram matrix is singular at lambda = 0 (repeated locations?); use lambda > 0");
    }
    throw std::runtime_error("fit_krr: linear solve failed the residual contract");
  }
  return KernelExpansion(locs, std::move(alpha), kernel);
}

double rkhs_norm(const KernelExpansion& expansion) {
  if (expansion.centroids().empty()) return 0.0;
  const Eigen::MatrixXd k = gram(expansion.kernel(), expansion.centroids());
  const double sq = expansion.coefficients().dot(k * expansion.coefficients());
  return std::sqrt(std::max(0.0, sq));
}

FitFunction krr_fit(Kernel kernel, double lambda) {
  return [kernel, lambda](const MeasurementSet& data) {
    const KernelExpansion fitted = fit_krr(kernel, data, lambda);
    return MapFunction([fitted](const Location& loc) { return fitted.evaluate(loc); });
  };
}

double krr_objective(const Kernel& kernel, const MeasurementSet& data, double lambda,
                     const KernelExpansion& expansion) {
  double fit = 0.0;
  for (const Measurement& m : data.measurements()) {
    const double r = m.value - expansion.evaluate(m.location);
    fit += r * r;
  }
  fit /= static_cast<double>(data.size());
  (void)kernel;
  const double norm = rkhs_norm(expansion);
  return fit + lambda * norm * norm;
}

}  // namespace radiomap
