#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "radiomap/gridmap.hpp"
#include "radiomap/measurement.hpp"
#include "radiomap/simulator.hpp"

namespace radiomap {

/// K spatial basis functions, orthonormal over the grid points
/// (Gaussian bumps mixed through the inverse Gram Cholesky factor).
class SpatialBasis {
 public:
  SpatialBasis(std::vector<Location> centers, double width, Eigen::MatrixXd mixing);

  Eigen::Index size() const { return mixing_.cols(); }
  Eigen::VectorXd evaluate(const Location& loc) const;
  Eigen::MatrixXd evaluation_matrix(const std::vector<Location>& points) const;

 private:
  Eigen::VectorXd raw_bumps(const Location& loc) const;

  std::vector<Location> centers_;
  double width_;
  Eigen::MatrixXd mixing_;  // bumps x basis functions
};

/// Gaussian bumps centered on a coarse subgrid, orthonormalized against
/// the dense grid.
SpatialBasis gaussian_bump_basis(const Grid& grid, int bumps_per_axis, double width);

/// Kriged Kalman filter for one anchor sensor: tracks the BEM state of
/// the time-varying shadowing mean and kriges the spatially correlated
/// innovation from the post-update residual.
class KrigedKalmanFilter {
 public:
  KrigedKalmanFilter(SpatialBasis basis, std::vector<Location> peer_locations,
                     Eigen::MatrixXd transition, Eigen::MatrixXd process_noise,
                     ShadowingParams innovation, double noise_variance,
                     Eigen::VectorXd initial_mean, Eigen::MatrixXd initial_cov);

  /// State propagation: mean <- F mean, cov <- F cov F^T + Q.
  void predict();
  /// Kalman update against the peer measurement vector (Joseph form).
  void update(const Eigen::VectorXd& measurements);

  const Eigen::VectorXd& state_mean() const { return mean_; }
  const Eigen::MatrixXd& state_cov() const { return cov_; }
  const Eigen::MatrixXd& measurement_matrix() const { return psi_; }
  const Eigen::MatrixXd& innovation_cov() const { return c_nu_; }
  double noise_variance() const { return sigma2_z_; }

  /// psi(x)^T state + kriging correction of the innovation component.
  double estimate_shadowing(const Location& loc) const;
  /// Gain-map value l(x) - s_hat(x) for a caller-supplied path loss.
  double estimate_gain_db(const Location& loc, const MapFunction& path_loss) const;

 private:
  SpatialBasis basis_;
  std::vector<Location> peers_;
  Eigen::MatrixXd psi_;  // peers x K
  Eigen::MatrixXd transition_;
  Eigen::MatrixXd process_noise_;
  ShadowingParams innovation_;
  Eigen::MatrixXd c_nu_;
  double sigma2_z_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::VectorXd post_residual_;
  bool has_update_ = false;
};

/// F = pinv(Psi) B and Q = pinv(Psi) C_eta pinv(Psi)^T for a dynamics
/// matrix B over the peer locations.
Eigen::MatrixXd kkf_transition(const SpatialBasis& basis, const std::vector<Location>& peers,
                               const Eigen::MatrixXd& dynamics);
Eigen::MatrixXd kkf_process_noise(const SpatialBasis& basis, const std::vector<Location>& peers,
                                  const Eigen::MatrixXd& c_eta);

/// Nonnegative spatial loss field on a grid.
struct Slf {
  Grid grid;
  Eigen::VectorXd values;

  Slf() = default;
  Slf(Grid g, Eigen::VectorXd v);
  GridMap as_gridmap() const { return GridMap(grid, values, Unit::kDb); }
};

/// Line-integral discretization of the tomographic model.
struct WeightModel {
  enum class Kind { kEllipse, kPiecewiseConstant };
  Kind kind = Kind::kPiecewiseConstant;
  /// Ellipse variant: points with d(p,a)+d(p,b) <= (1 + excess) * ||a-b||.
  double ellipse_excess = 0.05;
};

/// Row of per-cell weights for one link; the dot product with the SLF
/// values approximates (1/sqrt(||a-b||)) * integral of F along [a,b].
Eigen::VectorXd link_weights(const Grid& grid, const Location& a, const Location& b,
                             const WeightModel& model);

double line_integral(const Slf& slf, const Location& a, const Location& b, const WeightModel& model);

struct TomographySystem {
  Eigen::MatrixXd weights;      // links x grid cells
  Eigen::VectorXd attenuation;  // shadowing values per link
};

/// Builds W and y from link measurements (shadowing dB with path loss
/// already removed).
TomographySystem assemble_tomography(const MeasurementSet& links, const Grid& grid,
                                     const WeightModel& model);

enum class SlfRegularizer { kRidge, kLaplacianSmoothness };

/// Graph Laplacian of the grid adjacency (2 neighbors per axis).
Eigen::SparseMatrix<double> grid_laplacian(const Grid& grid);

struct SlfEstimateResult {
  Slf slf;
  bool converged = false;
  int iterations = 0;
};

/// min_{F >= 0} ||y - W F||^2 + lambda R(F) by projected gradient.
SlfEstimateResult estimate_slf(const TomographySystem& system, const Grid& grid, double lambda,
                               SlfRegularizer regularizer, double tolerance = 1e-8,
                               int max_iterations = 50000);

}  // namespace radiomap
