#pragma once

#include <Eigen/Dense>

#include "radiomap/kernels.hpp"
#include "radiomap/map_function.hpp"
#include "radiomap/simulator.hpp"

namespace radiomap {

/// Second-order model of the dB-domain map: mean function plus
/// Gudmundson shadowing and white fast-fading covariance.
class CovarianceModel {
 public:
  CovarianceModel() = default;
  CovarianceModel(MapFunction mean, ShadowingParams shadowing, FadingParams fading);

  double mean(const Location& loc) const { return mean_(loc); }
  /// Cov[p(x), p(x')]; the fading term contributes only at coincident
  /// coordinates.
  double cov(const Location& a, const Location& b) const;
  double prior_variance() const { return shadowing_.sigma2 + fading_.sigma2; }

  const ShadowingParams& shadowing() const { return shadowing_; }
  const FadingParams& fading() const { return fading_; }

 private:
  MapFunction mean_;
  ShadowingParams shadowing_;
  FadingParams fading_;
};

CovarianceModel build_covariance(const ShadowingParams& shadowing, const FadingParams& fading,
                                 MapFunction mean);

/// Mean function p_dB + l(x) - mu_s - mu_f for a single known transmitter.
MapFunction path_loss_mean(const Location& tx, double power_db, double exponent, double min_distance,
                           const ShadowingParams& shadowing, const FadingParams& fading);

/// Simple-kriging (LMMSE) interpolator with cached factorization of
/// Cov[m,m] = C_pp + sigma_z^2 I. When shadowing_only is set, the
/// target is the shadowing component and fading folds into the noise.
class KrigingEstimate {
 public:
  KrigingEstimate(CovarianceModel model, MeasurementSet data, bool shadowing_only);

  double evaluate(const Location& loc) const;
  double posterior_variance(const Location& loc) const;

  const CovarianceModel& model() const { return model_; }
  const MeasurementSet& data() const { return data_; }
  bool shadowing_only() const { return shadowing_only_; }

 private:
  Eigen::VectorXd cross_covariance(const Location& loc) const;

  CovarianceModel model_;
  MeasurementSet data_;
  bool shadowing_only_ = false;
  double prior_variance_ = 0.0;
  Eigen::LDLT<Eigen::MatrixXd> factorization_;
  Eigen::MatrixXd measurement_cov_;
  Eigen::VectorXd centered_;  // m - E[m]
  Eigen::VectorXd weights_;   // Cov^{-1}[m,m] (m - E[m])
};

KrigingEstimate fit_kriging(const CovarianceModel& model, const MeasurementSet& data,
                            bool shadowing_only = false);

/// Kernel view of a covariance function (kriging/KRR bridge).
Kernel kernel_from_covariance(const CovarianceModel& model);

struct EquivalenceReport {
  double max_deviation = 0.0;
  std::size_t probe_count = 0;
};

/// Max |kriging - KRR| over the probe points when the kernel is the
/// covariance and lambda N = sigma_z^2. Requires a zero-mean model.
EquivalenceReport kriging_as_krr_check(const CovarianceModel& model, const MeasurementSet& data,
                                       const std::vector<Location>& probes);

}  // namespace radiomap
