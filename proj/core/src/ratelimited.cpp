#include "radiomap/ratelimited.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "radiomap/linalg.hpp"
#include "radiomap/random.hpp"

namespace radiomap {

double branch_power(const Eigen::VectorXd& psd, const Eigen::VectorXd& response_sq,
                    const Eigen::VectorXd& frequencies) {
  if (psd.size() != response_sq.size() || psd.size() != frequencies.size()) {
    throw std::invalid_argument("branch_power: frequency grid mismatch");
  }
  double total = 0.0;
  for (Eigen::Index f = 1; f < frequencies.size(); ++f) {
    const double a = psd(f - 1) * response_sq(f - 1);
    const double b = psd(f) * response_sq(f);
    total += 0.5 * (a + b) * (frequencies(f) - frequencies(f - 1));
  }
  return total;
}

FilterBank::FilterBank(Eigen::VectorXd frequencies, std::vector<Eigen::MatrixXd> responses_sq)
    : frequencies_(std::move(frequencies)), responses_(std::move(responses_sq)) {
  for (const Eigen::MatrixXd& r : responses_) {
    if (r.cols() != frequencies_.size()) {
      throw std::invalid_argument("FilterBank: responses must be sampled on the frequency grid");
    }
    if (r.size() > 0 && r.minCoeff() < 0.0) {
      throw std::invalid_argument("FilterBank: squared responses must be nonnegative");
    }
  }
}

Eigen::MatrixXd FilterBank::projection_matrix(Eigen::Index sensor, const BemBasis& basis) const {
  const Eigen::MatrixXd& resp = responses_sq(sensor);
  Eigen::MatrixXd b(resp.rows(), basis.num_bands());
  for (Eigen::Index j = 0; j < resp.rows(); ++j) {
    for (Eigen::Index c = 0; c < basis.num_bands(); ++c) {
      b(j, c) = branch_power(basis.curves().row(c).transpose(), resp.row(j).transpose(),
                             frequencies_);
    }
  }
  // Pseudorandom filters must stay informative: with J <= C the rows
  // have to be linearly independent.
  if (resp.rows() <= basis.num_bands()) {
    const Eigen::MatrixXd g = b * b.transpose();
    const Eigen::VectorXd eigs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues();
    if (eigs.minCoeff() <= 1e-12 * std::max(1.0, eigs.maxCoeff())) {
      throw std::runtime_error("FilterBank: projection vectors are not linearly independent");
    }
  }
  return b;
}

FilterBank pseudorandom_filter_bank(const Eigen::VectorXd& frequencies, Eigen::Index num_sensors,
                                    Eigen::Index branches, std::uint64_t seed) {
  if (branches < 1 || num_sensors < 1) {
    throw std::invalid_argument("pseudorandom_filter_bank: need >= 1 sensor and branch");
  }
  std::vector<Eigen::MatrixXd> responses;
  responses.reserve(static_cast<std::size_t>(num_sensors));
  for (Eigen::Index n = 0; n < num_sensors; ++n) {
    Rng rng = make_rng(derive_seed(seed, static_cast<std::uint64_t>(n)));
    Eigen::MatrixXd r(branches, frequencies.size());
    for (Eigen::Index j = 0; j < branches; ++j) {
      const Eigen::VectorXd g = normal_vector(rng, frequencies.size());
      r.row(j) = g.array().square().matrix().transpose();
    }
    responses.push_back(std::move(r));
  }
  return FilterBank(frequencies, std::move(responses));
}

Quantizer::Quantizer(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.empty()) throw std::invalid_argument("Quantizer: need at least one breakpoint");
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end())) {
    throw std::invalid_argument("Quantizer: breakpoints must be sorted");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (breakpoints_[i] == breakpoints_[i - 1]) {
      throw std::invalid_argument("Quantizer: breakpoints must be distinct");
    }
  }
}

int Quantizer::code(double value) const {
  if (!std::isfinite(value)) throw std::invalid_argument("Quantizer::code: value must be finite");
  // Half-open [lo, hi): a value on a breakpoint belongs to the upper interval.
  return static_cast<int>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), value) -
                          breakpoints_.begin());
}

double Quantizer::lower(int code) const {
  if (code < 0 || code >= num_codes()) throw std::out_of_range("Quantizer::lower: bad code");
  return code == 0 ? -std::numeric_limits<double>::infinity()
                   : breakpoints_[static_cast<std::size_t>(code - 1)];
}

double Quantizer::upper(int code) const {
  if (code < 0 || code >= num_codes()) throw std::out_of_range("Quantizer::upper: bad code");
  return code == num_codes() - 1 ? std::numeric_limits<double>::infinity()
                                 : breakpoints_[static_cast<std::size_t>(code)];
}

double IntervalFitResult::evaluate_band(const Location& loc, Eigen::Index band) const {
  double v = 0.0;
  for (std::size_t n = 0; n < centroids.size(); ++n) {
    v += coefficients(static_cast<Eigen::Index>(n), band) * kernel(loc, centroids[n]);
  }
  return v;
}

double IntervalFitResult::evaluate(const Location& loc, const BemBasis& basis,
                                   Eigen::Index freq_index) const {
  double v = 0.0;
  for (Eigen::Index c = 0; c < basis.num_bands(); ++c) {
    v += evaluate_band(loc, c) * basis.curve(c, freq_index);
  }
  return v;
}

namespace {

struct PreparedMeasurement {
  Eigen::Index centroid = 0;  // row in the Gram matrix
  Eigen::VectorXd projection;  // length C
  double lo = 0.0;
  double hi = 0.0;
};

}  // namespace

double interval_objective(const std::vector<QuantizedMeasurement>& data, const Quantizer& quantizer,
                          const BemBasis& basis, const FilterBank& bank,
                          const std::vector<Location>& centroids, const Eigen::MatrixXd& gram_matrix,
                          const Eigen::MatrixXd& coefficients, double lambda, double penalty_weight) {
  double obj = 0.0;
  const Eigen::MatrixXd values = gram_matrix * coefficients;  // centroid values per band
  for (const QuantizedMeasurement& q : data) {
    Eigen::Index centroid = -1;
    for (std::size_t n = 0; n < centroids.size(); ++n) {
      if (centroids[n] == q.location) {
        centroid = static_cast<Eigen::Index>(n);
        break;
      }
    }
    const Eigen::VectorXd b =
        bank.projection_matrix(q.sensor_index, basis).row(q.branch).transpose();
    const double y = values.row(centroid).dot(b);
    const double lo = quantizer.lower(q.code);
    const double hi = quantizer.upper(q.code);
    obj += penalty_weight * std::max({0.0, y - hi, lo - y});
  }
  for (Eigen::Index c = 0; c < coefficients.cols(); ++c) {
    obj += lambda * coefficients.col(c).dot(gram_matrix * coefficients.col(c));
  }
  return obj;
}

IntervalFitResult fit_from_intervals(const std::vector<QuantizedMeasurement>& data,
                                     const Quantizer& quantizer, const BemBasis& basis,
                                     const FilterBank& bank, const Kernel& kernel, double lambda,
                                     double penalty_weight, const IntervalFitOptions& options) {
  if (data.empty()) throw std::invalid_argument("fit_from_intervals: no measurements");
  if (lambda < 0.0 || penalty_weight < 0.0) {
    throw std::invalid_argument("fit_from_intervals: weights must be nonnegative");
  }

  // Shared centroid set: the distinct sensor locations, in first-seen order.
  std::vector<Location> centroids;
  std::vector<PreparedMeasurement> prepared;
  prepared.reserve(data.size());
  for (const QuantizedMeasurement& q : data) {
    Eigen::Index idx = -1;
    for (std::size_t n = 0; n < centroids.size(); ++n) {
      if (centroids[n] == q.location) {
        idx = static_cast<Eigen::Index>(n);
        break;
      }
    }
    if (idx < 0) {
      centroids.push_back(q.location);
      idx = static_cast<Eigen::Index>(centroids.size()) - 1;
    }
    PreparedMeasurement p;
    p.centroid = idx;
    p.projection = bank.projection_matrix(q.sensor_index, basis).row(q.branch).transpose();
    p.lo = quantizer.lower(q.code);
    p.hi = quantizer.upper(q.code);
    prepared.push_back(std::move(p));
  }

  const Eigen::Index n_centroids = static_cast<Eigen::Index>(centroids.size());
  const Eigen::Index bands = basis.num_bands();
  const Eigen::MatrixXd k = gram(kernel, centroids);

  // Warm start: per-sensor band targets from interval midpoints (least
  // squares over the branch projections), then a ridge fit per band.
  Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(n_centroids, bands);
  {
    std::vector<std::vector<const PreparedMeasurement*>> by_centroid(
        static_cast<std::size_t>(n_centroids));
    for (const PreparedMeasurement& p : prepared) {
      by_centroid[static_cast<std::size_t>(p.centroid)].push_back(&p);
    }
    for (Eigen::Index n = 0; n < n_centroids; ++n) {
      const auto& group = by_centroid[static_cast<std::size_t>(n)];
      if (group.empty()) continue;
      Eigen::MatrixXd a(static_cast<Eigen::Index>(group.size()), bands);
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(group.size()));
      for (std::size_t j = 0; j < group.size(); ++j) {
        a.row(static_cast<Eigen::Index>(j)) = group[j]->projection.transpose();
        double lo = group[j]->lo, hi = group[j]->hi;
        if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 1.0 : 0.0;
        if (!std::isfinite(hi)) hi = lo + 1.0;
        rhs(static_cast<Eigen::Index>(j)) = 0.5 * (lo + hi);
      }
      Eigen::MatrixXd normal = a.transpose() * a;
      normal.diagonal().array() += options.init_ridge * std::max(1.0, normal.trace());
      targets.row(n) = solve_spd(normal, (a.transpose() * rhs).eval()).transpose();
    }
  }
  Eigen::MatrixXd km = k;
  km.diagonal().array() += std::max(lambda, 1e-10) * static_cast<double>(n_centroids);
  Eigen::MatrixXd alpha = Eigen::LDLT<Eigen::MatrixXd>(km).solve(targets);

  IntervalFitResult result;
  result.centroids = centroids;
  result.kernel = kernel;

  auto objective_of = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& values) {
    double obj = lambda * (a.array() * values.array()).sum();
    for (const PreparedMeasurement& p : prepared) {
      const double y = values.row(p.centroid).dot(p.projection);
      obj += penalty_weight * std::max({0.0, y - p.hi, p.lo - y});
    }
    return obj;
  };

  Eigen::MatrixXd values = k * alpha;
  double best_obj = objective_of(alpha, values);
  Eigen::MatrixXd best_alpha = alpha;

  // Diminishing-step subgradient descent with best-iterate tracking.
  const double k_norm = spectral_norm(k);
  double grad_scale = penalty_weight;
  for (const PreparedMeasurement& p : prepared) {
    grad_scale = std::max(grad_scale, penalty_weight * p.projection.cwiseAbs().maxCoeff());
  }
  const double step0 = 1.0 / std::max(1e-12, k_norm * (grad_scale + 2.0 * lambda));

  double stall_reference = best_obj;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    // Subgradient in expansion coefficients: K (pw sum s e_n b^T + 2 lambda alpha).
    Eigen::MatrixXd g = 2.0 * lambda * alpha;
    for (const PreparedMeasurement& p : prepared) {
      const double y = values.row(p.centroid).dot(p.projection);
      double sign = 0.0;
      if (y > p.hi) sign = 1.0;
      else if (y < p.lo) sign = -1.0;
      if (sign != 0.0) g.row(p.centroid) += (penalty_weight * sign) * p.projection.transpose();
    }

    const double step = step0 / std::sqrt(static_cast<double>(it + 1));
    alpha -= step * (k * g);
    values = k * alpha;

    const double obj = objective_of(alpha, values);
    if (obj < best_obj) {
      best_obj = obj;
      best_alpha = alpha;
    }
    if ((it + 1) % 200 == 0) {
      if (stall_reference - best_obj <= options.tolerance * std::max(1.0, std::abs(stall_reference))) {
        result.converged = true;
        ++it;
        break;
      }
      stall_reference = best_obj;
    }
  }

  result.iterations = it;
  result.coefficients = std::move(best_alpha);
  result.objective = best_obj;
  return result;
}

}  // namespace radiomap
