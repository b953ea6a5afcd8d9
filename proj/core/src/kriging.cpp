#include "radiomap/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radiomap {

CovarianceModel::CovarianceModel(MapFunction mean, ShadowingParams shadowing, FadingParams fading)
    : mean_(std::move(mean)), shadowing_(shadowing), fading_(fading) {
  if (!mean_) throw std::invalid_argument("CovarianceModel: mean function required");
}

double CovarianceModel::cov(const Location& a, const Location& b) const {
  const double shadow = gudmundson_covariance(shadowing_, distance(a, b));
  return a == b ? shadow + fading_.sigma2 : shadow;
}

CovarianceModel build_covariance(const ShadowingParams& shadowing, const FadingParams& fading,
                                 MapFunction mean) {
  return CovarianceModel(std::move(mean), shadowing, fading);
}

MapFunction path_loss_mean(const Location& tx, double power_db, double exponent, double min_distance,
                           const ShadowingParams& shadowing, const FadingParams& fading) {
  const double offset = power_db - shadowing.mean - fading.mean;
  return [=](const Location& x) { return offset + path_loss_db(tx, x, exponent, min_distance); };
}

KrigingEstimate::KrigingEstimate(CovarianceModel model, MeasurementSet data, bool shadowing_only)
    : model_(std::move(model)), data_(std::move(data)), shadowing_only_(shadowing_only) {
  prior_variance_ = shadowing_only_ ? model_.shadowing().sigma2 : model_.prior_variance();
  if (data_.empty()) return;  // degenerate fit: the prior
  const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
  const std::vector<Location> locs = data_.locations();

  // Cov[m,m]: Gudmundson off-diagonals; fading and measurement noise on
  // the diagonal (fading is re-drawn per observation, so it contributes
  // per measurement index, not per coordinate).
  measurement_cov_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = gudmundson_covariance(model_.shadowing(),
                                             distance(locs[static_cast<std::size_t>(i)],
                                                      locs[static_cast<std::size_t>(j)]));
      measurement_cov_(i, j) = c;
      measurement_cov_(j, i) = c;
    }
  }
  measurement_cov_.diagonal().array() += model_.fading().sigma2 + data_.noise_variance();

  centered_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    centered_(i) = data_[static_cast<std::size_t>(i)].value -
                   model_.mean(locs[static_cast<std::size_t>(i)]);
  }

  factorization_.compute(measurement_cov_);
  bool ok = factorization_.info() == Eigen::Success;
  if (ok) {
    weights_ = factorization_.solve(centered_);
    ok = (measurement_cov_ * weights_ - centered_).norm() <= 1e-8 * (centered_.norm() + 1.0);
  }
  if (!ok) {
    // Jitter escalation mirrors the sampling policy; rethrow if even
    // 1e-6 relative loading cannot stabilize the system.
    const double scale = measurement_cov_.diagonal().cwiseAbs().mean();
    for (double jitter = 1e-12; jitter <= 1e-6; jitter *= 100.0) {
      Eigen::MatrixXd loaded = measurement_cov_;
      loaded.diagonal().array() += jitter * (scale > 0.0 ? scale : 1.0);
      factorization_.compute(loaded);
      if (factorization_.info() != Eigen::Success) continue;
      weights_ = factorization_.solve(centered_);
      if ((loaded * weights_ - centered_).norm() <= 1e-8 * (centered_.norm() + 1.0)) {
        measurement_cov_ = loaded;
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::runtime_error(
          "fit_kriging: measurement covariance is singular (duplicate locations with zero noise?)");
    }
  }
}

Eigen::VectorXd KrigingEstimate::cross_covariance(const Location& loc) const {
  const Eigen::Index n = static_cast<Eigen::Index>(data_.size());
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Location& xi = data_[static_cast<std::size_t>(i)].location;
    double v = gudmundson_covariance(model_.shadowing(), distance(loc, xi));
    if (!shadowing_only_ && loc == xi) v += model_.fading().sigma2;
    c(i) = v;
  }
  return c;
}

double KrigingEstimate::evaluate(const Location& loc) const {
  if (data_.empty()) return model_.mean(loc);
  return model_.mean(loc) + cross_covariance(loc).dot(weights_);
}

double KrigingEstimate::posterior_variance(const Location& loc) const {
  if (data_.empty()) return prior_variance_;
  const Eigen::VectorXd c = cross_covariance(loc);
  const double v = prior_variance_ - c.dot(factorization_.solve(c));
  return std::clamp(v, 0.0, prior_variance_);
}

KrigingEstimate fit_kriging(const CovarianceModel& model, const MeasurementSet& data,
                            bool shadowing_only) {
  return KrigingEstimate(model, data, shadowing_only);
}

Kernel kernel_from_covariance(const CovarianceModel& model) {
  return Kernel([model](const Location& a, const Location& b) { return model.cov(a, b); },
                "covariance");
}

EquivalenceReport kriging_as_krr_check(const CovarianceModel& model, const MeasurementSet& data,
                                       const std::vector<Location>& probes) {
  const KrigingEstimate kriged = fit_kriging(model, data);

  // KRR side: kernel = covariance, lambda N = sigma_z^2, data centered
  // by the model mean (a no-op for zero-mean models).
  std::vector<Measurement> centered;
  centered.reserve(data.size());
  for (const Measurement& m : data.measurements()) {
    Measurement c = m;
    c.value -= model.mean(m.location);
    centered.push_back(std::move(c));
  }
  const MeasurementSet centered_set(std::move(centered), data.noise_variance(), data.unit());
  const double n = static_cast<double>(data.size());
  const KernelExpansion krr =
      fit_krr(kernel_from_covariance(model), centered_set, data.noise_variance() / n);

  EquivalenceReport report;
  report.probe_count = probes.size();
  for (const Location& x : probes) {
    const double krr_value = model.mean(x) + krr.evaluate(x);
    report.max_deviation =
        std::max(report.max_deviation, std::abs(kriged.evaluate(x) - krr_value));
  }
  return report;
}

}  // namespace radiomap
