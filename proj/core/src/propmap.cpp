#include "radiomap/propmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "radiomap/linalg.hpp"

namespace radiomap {

SpatialBasis::SpatialBasis(std::vector<Location> centers, double width, Eigen::MatrixXd mixing)
    : centers_(std::move(centers)), width_(width), mixing_(std::move(mixing)) {
  if (static_cast<Eigen::Index>(centers_.size()) != mixing_.rows()) {
    throw std::invalid_argument("SpatialBasis: one mixing row per bump");
  }
  if (!(width_ > 0.0)) throw std::invalid_argument("SpatialBasis: width must be positive");
}

Eigen::VectorXd SpatialBasis::raw_bumps(const Location& loc) const {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(centers_.size()));
  const double denom = 2.0 * width_ * width_;
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    const double d = distance(loc, centers_[j]);
    phi(static_cast<Eigen::Index>(j)) = std::exp(-d * d / denom);
  }
  return phi;
}

Eigen::VectorXd SpatialBasis::evaluate(const Location& loc) const {
  return mixing_.transpose() * raw_bumps(loc);
}

Eigen::MatrixXd SpatialBasis::evaluation_matrix(const std::vector<Location>& points) const {
  Eigen::MatrixXd psi(static_cast<Eigen::Index>(points.size()), size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    psi.row(static_cast<Eigen::Index>(i)) = evaluate(points[i]).transpose();
  }
  return psi;
}

SpatialBasis gaussian_bump_basis(const Grid& grid, int bumps_per_axis, double width) {
  if (bumps_per_axis < 1) throw std::invalid_argument("gaussian_bump_basis: need >= 1 bump per axis");
  std::vector<int> counts(static_cast<std::size_t>(grid.dim()), bumps_per_axis);
  const Grid coarse(grid.region(), std::span<const int>(counts));
  std::vector<Location> centers = grid_points(coarse);

  // Orthonormalize against the dense grid through the Gram Cholesky factor.
  const Eigen::Index k = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(grid.size()), k);
  const double denom = 2.0 * width * width;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Location p = grid.point(g);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double d = distance(p, centers[static_cast<std::size_t>(j)]);
      phi(static_cast<Eigen::Index>(g), j) = std::exp(-d * d / denom);
    }
  }
  const Eigen::MatrixXd gram = phi.transpose() * phi;
  const Eigen::MatrixXd chol = cholesky_with_jitter(gram);
  const Eigen::MatrixXd mixing =
      chol.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  return SpatialBasis(std::move(centers), width, mixing);
}

KrigedKalmanFilter::KrigedKalmanFilter(SpatialBasis basis, std::vector<Location> peer_locations,
                                       Eigen::MatrixXd transition, Eigen::MatrixXd process_noise,
                                       ShadowingParams innovation, double noise_variance,
                                       Eigen::VectorXd initial_mean, Eigen::MatrixXd initial_cov)
    : basis_(std::move(basis)), peers_(std::move(peer_locations)), transition_(std::move(transition)),
      process_noise_(std::move(process_noise)), innovation_(innovation), sigma2_z_(noise_variance),
      mean_(std::move(initial_mean)), cov_(std::move(initial_cov)) {
  const Eigen::Index k = basis_.size();
  if (transition_.rows() != k || transition_.cols() != k) {
    throw std::invalid_argument("KrigedKalmanFilter: transition must be K x K");
  }
  if (process_noise_.rows() != k || process_noise_.cols() != k) {
    throw std::invalid_argument("KrigedKalmanFilter: process noise must be K x K");
  }
  if (mean_.size() != k || cov_.rows() != k || cov_.cols() != k) {
    throw std::invalid_argument("KrigedKalmanFilter: state dimension mismatch");
  }
  if (sigma2_z_ < 0.0) throw std::invalid_argument("KrigedKalmanFilter: noise variance < 0");
  psi_ = basis_.evaluation_matrix(peers_);

  const Eigen::Index n = static_cast<Eigen::Index>(peers_.size());
  c_nu_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = gudmundson_covariance(innovation_, distance(peers_[static_cast<std::size_t>(i)],
                                                                   peers_[static_cast<std::size_t>(j)]));
      c_nu_(i, j) = c;
      c_nu_(j, i) = c;
    }
  }
}

void KrigedKalmanFilter::predict() {
  mean_ = transition_ * mean_;
  cov_ = transition_ * cov_ * transition_.transpose() + process_noise_;
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
}

void KrigedKalmanFilter::update(const Eigen::VectorXd& measurements) {
  const Eigen::Index n = psi_.rows();
  if (measurements.size() != n) {
    throw std::invalid_argument("KrigedKalmanFilter::update: measurement length mismatch");
  }
  Eigen::MatrixXd r = c_nu_;
  r.diagonal().array() += sigma2_z_;
  Eigen::MatrixXd innovation_cov = psi_ * cov_ * psi_.transpose() + r;
  innovation_cov = 0.5 * (innovation_cov + innovation_cov.transpose()).eval();

  // Gain via the jittered SPD solve; escalation failure means the
  // innovation covariance is genuinely singular.
  const Eigen::MatrixXd gain_t = solve_spd(innovation_cov, (psi_ * cov_.transpose()).eval());
  const Eigen::MatrixXd gain = gain_t.transpose();  // K x n

  mean_ += gain * (measurements - psi_ * mean_);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(cov_.rows(), cov_.cols());
  const Eigen::MatrixXd a = identity - gain * psi_;
  cov_ = a * cov_ * a.transpose() + gain * r * gain.transpose();
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();

  post_residual_ = measurements - psi_ * mean_;
  has_update_ = true;
}

double KrigedKalmanFilter::estimate_shadowing(const Location& loc) const {
  double value = basis_.evaluate(loc).dot(mean_);
  if (has_update_ && innovation_.sigma2 > 0.0) {
    const Eigen::Index n = static_cast<Eigen::Index>(peers_.size());
    Eigen::VectorXd cross(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      cross(i) = gudmundson_covariance(innovation_, distance(loc, peers_[static_cast<std::size_t>(i)]));
    }
    Eigen::MatrixXd r = c_nu_;
    r.diagonal().array() += sigma2_z_;
    value += cross.dot(solve_spd(r, post_residual_));
  }
  return value;
}

double KrigedKalmanFilter::estimate_gain_db(const Location& loc, const MapFunction& path_loss) const {
  return path_loss(loc) - estimate_shadowing(loc);
}

Eigen::MatrixXd kkf_transition(const SpatialBasis& basis, const std::vector<Location>& peers,
                               const Eigen::MatrixXd& dynamics) {
  const Eigen::MatrixXd psi = basis.evaluation_matrix(peers);
  return psi.completeOrthogonalDecomposition().pseudoInverse() * dynamics;
}

Eigen::MatrixXd kkf_process_noise(const SpatialBasis& basis, const std::vector<Location>& peers,
                                  const Eigen::MatrixXd& c_eta) {
  const Eigen::MatrixXd pinv = basis.evaluation_matrix(peers).completeOrthogonalDecomposition()
                                   .pseudoInverse();
  Eigen::MatrixXd q = pinv * c_eta * pinv.transpose();
  return 0.5 * (q + q.transpose());
}

Slf::Slf(Grid g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw std::invalid_argument("Slf: values length must equal grid size");
  }
  if (values.size() > 0 && values.minCoeff() < 0.0) {
    throw std::invalid_argument("Slf: values must be nonnegative");
  }
}

namespace {

Eigen::VectorXd piecewise_weights(const Grid& grid, const Location& a, const Location& b) {
  const double length = distance(a, b);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  const Region& region = grid.region();
  const int dim = grid.dim();

  // Clip the segment to the region (slab method); SLF is zero outside.
  double t0 = 0.0, t1 = 1.0;
  for (int axis = 0; axis < dim; ++axis) {
    const double d = b[axis] - a[axis];
    if (d == 0.0) {
      if (a[axis] < region.lower[axis] || a[axis] > region.upper[axis]) return w;
      continue;
    }
    double ta = (region.lower[axis] - a[axis]) / d;
    double tb = (region.upper[axis] - a[axis]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 >= t1) return w;

  std::vector<double> cuts{t0, t1};
  for (int axis = 0; axis < dim; ++axis) {
    const double d = b[axis] - a[axis];
    if (d == 0.0) continue;
    for (int i = 1; i < grid.count(axis); ++i) {
      const double plane = region.lower[axis] + static_cast<double>(i) * grid.cell_size(axis);
      const double t = (plane - a[axis]) / d;
      if (t > t0 && t < t1) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double seg = (cuts[k + 1] - cuts[k]) * length;
    if (seg <= 0.0) continue;
    const double tm = 0.5 * (cuts[k] + cuts[k + 1]);
    std::array<int, 3> mi{0, 0, 0};
    for (int axis = 0; axis < dim; ++axis) {
      const double x = a[axis] + tm * (b[axis] - a[axis]);
      int i = static_cast<int>(std::floor((x - region.lower[axis]) / grid.cell_size(axis)));
      mi[static_cast<std::size_t>(axis)] = std::clamp(i, 0, grid.count(axis) - 1);
    }
    const std::size_t cell =
        grid.linear_index(std::span<const int>(mi.data(), static_cast<std::size_t>(dim)));
    w(static_cast<Eigen::Index>(cell)) += seg;
  }
  return w / std::sqrt(length);
}

Eigen::VectorXd ellipse_weights(const Grid& grid, const Location& a, const Location& b,
                                double excess) {
  const double length = distance(a, b);
  const double threshold = length * (1.0 + excess);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  std::vector<std::size_t> inside;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Location p = grid.point(g);
    if (distance(p, a) + distance(p, b) <= threshold) inside.push_back(g);
  }
  if (inside.empty()) return w;  // the ellipse missed every grid point
  const double weight = 1.0 / (static_cast<double>(inside.size()) * std::sqrt(length));
  for (std::size_t g : inside) w(static_cast<Eigen::Index>(g)) = weight;
  return w;
}

}  // namespace

Eigen::VectorXd link_weights(const Grid& grid, const Location& a, const Location& b,
                             const WeightModel& model) {
  if (distance(a, b) == 0.0) throw std::invalid_argument("link_weights: zero-length link");
  switch (model.kind) {
    case WeightModel::Kind::kPiecewiseConstant:
      return piecewise_weights(grid, a, b);
    case WeightModel::Kind::kEllipse:
      return ellipse_weights(grid, a, b, model.ellipse_excess);
  }
  throw std::logic_error("link_weights: unknown weight model");
}

double line_integral(const Slf& slf, const Location& a, const Location& b, const WeightModel& model) {
  return link_weights(slf.grid, a, b, model).dot(slf.values);
}

TomographySystem assemble_tomography(const MeasurementSet& links, const Grid& grid,
                                     const WeightModel& model) {
  if (!links.is_link_set()) {
    throw std::invalid_argument("assemble_tomography: link measurements required");
  }
  TomographySystem system;
  system.weights.resize(static_cast<Eigen::Index>(links.size()),
                        static_cast<Eigen::Index>(grid.size()));
  system.attenuation.resize(static_cast<Eigen::Index>(links.size()));
  for (std::size_t n = 0; n < links.size(); ++n) {
    const Measurement& m = links[n];
    system.weights.row(static_cast<Eigen::Index>(n)) =
        link_weights(grid, m.location, *m.second_location, model).transpose();
    system.attenuation(static_cast<Eigen::Index>(n)) = m.value;
  }
  return system;
}

Eigen::SparseMatrix<double> grid_laplacian(const Grid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto mi = grid.multi_index(g);
    for (int axis = 0; axis < grid.dim(); ++axis) {
      auto neighbor = mi;
      neighbor[static_cast<std::size_t>(axis)] += 1;
      if (neighbor[static_cast<std::size_t>(axis)] >= grid.count(axis)) continue;
      const std::size_t h = grid.linear_index(
          std::span<const int>(neighbor.data(), static_cast<std::size_t>(grid.dim())));
      triplets.emplace_back(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h), -1.0);
      triplets.emplace_back(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(g), -1.0);
      degree(static_cast<Eigen::Index>(g)) += 1.0;
      degree(static_cast<Eigen::Index>(h)) += 1.0;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, degree(i));
  Eigen::SparseMatrix<double> laplacian(n, n);
  laplacian.setFromTriplets(triplets.begin(), triplets.end());
  return laplacian;
}

SlfEstimateResult estimate_slf(const TomographySystem& system, const Grid& grid, double lambda,
                               SlfRegularizer regularizer, double tolerance, int max_iterations) {
  if (lambda < 0.0) throw std::invalid_argument("estimate_slf: lambda must be nonnegative");
  const Eigen::Index g = system.weights.cols();
  const Eigen::MatrixXd& w = system.weights;
  const Eigen::VectorXd& y = system.attenuation;

  Eigen::SparseMatrix<double> laplacian;
  double reg_lipschitz = 2.0;
  if (regularizer == SlfRegularizer::kLaplacianSmoothness) {
    laplacian = grid_laplacian(grid);
    reg_lipschitz = 4.0 * grid.dim();  // ||L|| <= 2 * max degree
  }
  const double sw = spectral_norm(w);
  const double lipschitz = 2.0 * sw * sw + lambda * reg_lipschitz;
  const double step = lipschitz > 0.0 ? 1.0 / (1.01 * lipschitz) : 1.0;
  const double scale = std::max(1.0, (2.0 * w.transpose() * y).cwiseAbs().maxCoeff());

  Eigen::VectorXd f = Eigen::VectorXd::Zero(g);
  SlfEstimateResult result;
  int it = 0;
  for (; it < max_iterations; ++it) {
    Eigen::VectorXd grad = 2.0 * w.transpose() * (w * f - y);
    if (lambda > 0.0) {
      grad += regularizer == SlfRegularizer::kRidge
                  ? (2.0 * lambda * f).eval()
                  : (2.0 * lambda * (laplacian * f)).eval();
    }
    const Eigen::VectorXd next = (f - step * grad).cwiseMax(0.0);
    const double residual = (f - next).cwiseAbs().maxCoeff() / step;
    f = next;
    if (residual <= tolerance * scale) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.iterations = it;
  result.slf = Slf(grid, std::move(f));
  return result;
}

}  // namespace radiomap
