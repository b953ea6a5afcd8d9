#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "radiomap/map_function.hpp"

namespace radiomap {

/// Basis expansion model over a discrete frequency grid: C nonnegative,
/// linearly independent curves b_c(f) with center frequencies.
class BemBasis {
 public:
  BemBasis(Eigen::VectorXd frequency_grid, Eigen::MatrixXd curves, Eigen::VectorXd center_frequencies);

  Eigen::Index num_bands() const { return curves_.rows(); }
  Eigen::Index num_frequencies() const { return frequencies_.size(); }
  const Eigen::VectorXd& frequencies() const { return frequencies_; }
  const Eigen::MatrixXd& curves() const { return curves_; }
  double curve(Eigen::Index band, Eigen::Index freq_index) const { return curves_(band, freq_index); }
  const Eigen::VectorXd& centers() const { return centers_; }

  /// PSD vector of a coefficient combination, sampled on the grid.
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coefficients) const;
  /// Trapezoidal integral over frequency of a sampled PSD.
  double integrate(const Eigen::VectorXd& psd) const;

 private:
  Eigen::VectorXd frequencies_;
  Eigen::MatrixXd curves_;  // num_bands x num_frequencies
  Eigen::VectorXd centers_;
};

/// Raised-cosine bumps centered at the given frequencies.
BemBasis raised_cosine_basis(const Eigen::VectorXd& frequency_grid, const Eigen::VectorXd& centers,
                             double bandwidth, double rolloff);
/// One indicator curve per grid frequency (C = F).
BemBasis indicator_basis(const Eigen::VectorXd& frequency_grid);
/// A single flat curve (C = 1).
BemBasis flat_basis(const Eigen::VectorXd& frequency_grid);

/// Per-sensor PSD vectors (periodogram-style, nonnegative).
class PsdMeasurementSet {
 public:
  PsdMeasurementSet(std::vector<Location> locations, Eigen::MatrixXd psd, double noise_variance);

  std::size_t size() const { return locations_.size(); }
  Eigen::Index num_frequencies() const { return psd_.cols(); }
  const std::vector<Location>& locations() const { return locations_; }
  const Eigen::MatrixXd& psd() const { return psd_; }  // size() x num_frequencies
  double noise_variance() const { return noise_variance_; }

  /// Scalar measurement set for one frequency index.
  MeasurementSet slice(Eigen::Index freq_index) const;

 private:
  std::vector<Location> locations_;
  Eigen::MatrixXd psd_;
  double noise_variance_;
};

/// PSD measurement CSV: long format `x,y,z,f_index,value`.
void save_psd_measurements(const PsdMeasurementSet& set, const std::string& path);
PsdMeasurementSet load_psd_measurements(const std::string& path, double noise_variance);

struct PerFrequencyEstimate {
  std::vector<MapFunction> maps;  // one per frequency
  double evaluate(const Location& loc, Eigen::Index freq_index) const;
};

PerFrequencyEstimate fit_per_frequency(const PsdMeasurementSet& data, const FitFunction& inner);

struct NarrowbandEstimate {
  std::vector<MapFunction> gain_maps;  // one per source
  Eigen::MatrixXd tx_psd;              // sources x frequencies, rows sum to 1
  Eigen::MatrixXd gains_at_sensors;    // sensors x sources (the factor H)
  std::vector<double> objective_history;  // factorization fit per sweep
  bool converged = false;
  double evaluate(const Location& loc, Eigen::Index freq_index) const;
};

/// Factorizes the sensor-by-frequency PSD matrix into nonnegative
/// gains x transmit PSDs, then interpolates the gain columns spatially.
NarrowbandEstimate fit_narrowband(const PsdMeasurementSet& data, int num_sources, std::uint64_t seed,
                                  const FitFunction& spatial, int max_sweeps = 500,
                                  double fit_tolerance = 1e-10);

struct WidebandBemEstimate {
  std::vector<MapFunction> coefficient_maps;  // one per basis curve
  Eigen::MatrixXd curves;                     // copy of the basis curves
  Eigen::MatrixXd sensor_coefficients;        // sensors x bands (projection targets)
  double evaluate(const Location& loc, Eigen::Index freq_index) const;
};

/// Projects each sensor PSD onto the basis (nonnegative least squares)
/// and fits one spatial map per basis coefficient.
WidebandBemEstimate fit_wideband_bem(const PsdMeasurementSet& data, const BemBasis& basis,
                                     const FitFunction& inner);

}  // namespace radiomap
