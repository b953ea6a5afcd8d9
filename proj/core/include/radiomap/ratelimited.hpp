#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "radiomap/kernels.hpp"
#include "radiomap/psd.hpp"

namespace radiomap {

/// Power at a filter branch output: trapezoidal integral of
/// psd(f) * |g(f)|^2 over the shared frequency grid.
double branch_power(const Eigen::VectorXd& psd, const Eigen::VectorXd& response_sq,
                    const Eigen::VectorXd& frequencies);

/// Per-sensor bank of squared filter frequency responses.
class FilterBank {
 public:
  FilterBank(Eigen::VectorXd frequencies, std::vector<Eigen::MatrixXd> responses_sq);

  Eigen::Index num_sensors() const { return static_cast<Eigen::Index>(responses_.size()); }
  Eigen::Index branches() const { return responses_.empty() ? 0 : responses_.front().rows(); }
  const Eigen::VectorXd& frequencies() const { return frequencies_; }
  const Eigen::MatrixXd& responses_sq(Eigen::Index sensor) const {
    return responses_[static_cast<std::size_t>(sensor)];
  }

  /// (branches x bands) matrix of integrals of b_c |g|^2; the rows must
  /// be linearly independent whenever branches <= bands.
  Eigen::MatrixXd projection_matrix(Eigen::Index sensor, const BemBasis& basis) const;

 private:
  Eigen::VectorXd frequencies_;
  std::vector<Eigen::MatrixXd> responses_;  // per sensor: branches x frequencies
};

/// Seeded pseudorandom bank: squared Gaussian response samples.
FilterBank pseudorandom_filter_bank(const Eigen::VectorXd& frequencies, Eigen::Index num_sensors,
                                    Eigen::Index branches, std::uint64_t seed);

/// Scalar quantizer with sorted breakpoints; interval convention is
/// half-open [lo, hi), with unbounded end intervals.
class Quantizer {
 public:
  explicit Quantizer(std::vector<double> breakpoints);

  int num_codes() const { return static_cast<int>(breakpoints_.size()) + 1; }
  int code(double value) const;
  double lower(int code) const;  // -inf for the first interval
  double upper(int code) const;  // +inf for the last interval
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  std::vector<double> breakpoints_;
};

struct QuantizedMeasurement {
  Location location;
  int sensor_index = 0;
  int branch = 0;
  int code = 0;
};

struct IntervalFitOptions {
  double tolerance = 1e-6;
  int max_iterations = 100000;
  /// Ridge weight of the warm-start regression on interval midpoints.
  double init_ridge = 1e-8;
};

struct IntervalFitResult {
  std::vector<Location> centroids;
  Eigen::MatrixXd coefficients;  // centroids x bands
  Kernel kernel;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;

  /// Value of the band-c coefficient map at loc.
  double evaluate_band(const Location& loc, Eigen::Index band) const;
  /// Reconstructed PSD value at (loc, frequency index).
  double evaluate(const Location& loc, const BemBasis& basis, Eigen::Index freq_index) const;
};

/// Fits the BEM coefficient maps from quantization intervals by
/// minimizing penalty_weight * sum_n max(0, y_n - hi_n, lo_n - y_n)
/// + lambda * sum_c ||f_c||_H^2 with subgradient descent (diminishing
/// steps, best-iterate tracking), warm-started from a ridge fit on the
/// interval midpoints.
IntervalFitResult fit_from_intervals(const std::vector<QuantizedMeasurement>& data,
                                     const Quantizer& quantizer, const BemBasis& basis,
                                     const FilterBank& bank, const Kernel& kernel, double lambda,
                                     double penalty_weight = 1.0,
                                     const IntervalFitOptions& options = {});

double interval_objective(const std::vector<QuantizedMeasurement>& data, const Quantizer& quantizer,
                          const BemBasis& basis, const FilterBank& bank,
                          const std::vector<Location>& centroids, const Eigen::MatrixXd& gram_matrix,
                          const Eigen::MatrixXd& coefficients, double lambda, double penalty_weight);

}  // namespace radiomap
