#pragma once

#include <Eigen/Dense>

namespace radiomap {

/// Lower Cholesky factor of a symmetric PSD matrix. On failure, retries
/// with diagonal jitter escalating from 1e-12 to 1e-6 (relative to the
/// mean diagonal); throws if all retries fail.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& m);

/// Solves a symmetric positive (semi)definite system with the same
/// jitter escalation policy.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Largest singular value estimated by power iteration on AᵀA.
double spectral_norm(const Eigen::MatrixXd& a, int iterations = 100);

inline double soft_threshold(double v, double threshold) {
  if (v > threshold) return v - threshold;
  if (v < -threshold) return v + threshold;
  return 0.0;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double threshold);

/// min_{x >= 0} ||a x - b||^2 by Lawson-Hanson active set. Intended for
/// small systems (tens of unknowns).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 1000);

}  // namespace radiomap
