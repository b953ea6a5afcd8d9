#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "radiomap/kriging.hpp"
#include "radiomap/random.hpp"

using namespace radiomap;

namespace {

MeasurementSet make_set(const std::vector<Location>& locs, const Eigen::VectorXd& values,
                        double noise) {
  std::vector<Measurement> ms;
  for (std::size_t i = 0; i < locs.size(); ++i) {
    Measurement m;
    m.location = locs[i];
    m.value = values(static_cast<Eigen::Index>(i));
    ms.push_back(std::move(m));
  }
  return MeasurementSet(std::move(ms), noise, Unit::kDb);
}

MapFunction zero_mean() {
  return [](const Location&) { return 0.0; };
}

}  // namespace

TEST_SUITE("kriging") {

TEST_CASE("covariance model") {
  const ShadowingParams shadowing{4.0, 3.0, 0.0};
  const FadingParams fading{1.5, 0.0};
  const CovarianceModel model = build_covariance(shadowing, fading, zero_mean());

  CHECK(model.cov(Location(1.0, 2.0), Location(1.0, 2.0)) == doctest::Approx(5.5));
  // Distinct points at the decorrelation distance: half the shadowing variance.
  CHECK(model.cov(Location(0.0), Location(3.0)) == doctest::Approx(2.0));

  Rng rng = make_rng(3);
  for (int i = 0; i < 10; ++i) {
    const Location a(normal_vector(rng, 1)(0), normal_vector(rng, 1)(0));
    const Location b(normal_vector(rng, 1)(0), normal_vector(rng, 1)(0));
    CHECK(model.cov(a, b) == doctest::Approx(model.cov(b, a)).epsilon(1e-15));
    CHECK(model.cov(a, a) >= model.cov(a, b));
  }
}

TEST_CASE("kriging reproduces noiseless observations") {
  const CovarianceModel model = build_covariance({4.0, 3.0, 0.0}, {0.5, 0.0}, zero_mean());
  const std::vector<Location> locs{Location(0.0), Location(2.0), Location(5.0)};
  const Eigen::Vector3d m(1.0, -2.0, 0.7);
  const KrigingEstimate est = fit_kriging(model, make_set(locs, m, 0.0));
  for (std::size_t i = 0; i < locs.size(); ++i) {
    CHECK(est.evaluate(locs[i]) == doctest::Approx(m(static_cast<Eigen::Index>(i))).epsilon(1e-8));
  }
}

TEST_CASE("kriging reverts to the mean far from data") {
  const double power_db = 3.0;
  const ShadowingParams shadowing{4.0, 2.0, 1.0};
  const FadingParams fading{0.0, 0.0};
  const MapFunction mean = path_loss_mean(Location(0.0), power_db, 2.0, 1e-3, shadowing, fading);
  const CovarianceModel model = build_covariance(shadowing, fading, mean);

  const std::vector<Location> locs{Location(1.0), Location(2.0)};
  const Eigen::Vector2d m(2.0, -4.0);
  const KrigingEstimate est = fit_kriging(model, make_set(locs, m, 0.1));
  const Location far(500.0);  // hundreds of decorrelation distances away
  CHECK(std::abs(est.evaluate(far) - mean(far)) < 1e-6 * std::sqrt(shadowing.sigma2));
}

TEST_CASE("two-point fit matches the closed-form oracle") {
  const ShadowingParams shadowing{3.0, 4.0, 0.0};
  const FadingParams fading{0.7, 0.0};
  const double sigma_z2 = 0.2;
  const CovarianceModel model = build_covariance(shadowing, fading, zero_mean());
  const std::vector<Location> locs{Location(1.0), Location(4.0)};
  const Eigen::Vector2d m(1.3, -0.4);
  const KrigingEstimate est = fit_kriging(model, make_set(locs, m, sigma_z2));

  // Hand-coded 2x2 inversion of Eq.-style LMMSE.
  const double c12 = shadowing.sigma2 * std::exp2(-3.0 / shadowing.decorrelation_distance);
  const double diag = shadowing.sigma2 + fading.sigma2 + sigma_z2;
  const double det = diag * diag - c12 * c12;
  const Eigen::Matrix2d cinv = (Eigen::Matrix2d() << diag / det, -c12 / det, -c12 / det, diag / det)
                                   .finished();
  for (double x : {0.0, 2.0, 3.5, 7.0}) {
    const Location probe(x);
    Eigen::Vector2d cross;
    for (int i = 0; i < 2; ++i) {
      cross(i) = shadowing.sigma2 *
                 std::exp2(-distance(probe, locs[static_cast<std::size_t>(i)]) /
                           shadowing.decorrelation_distance);
      if (probe == locs[static_cast<std::size_t>(i)]) cross(i) += fading.sigma2;
    }
    const double oracle = cross.dot(cinv * m);
    CHECK(est.evaluate(probe) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("posterior variance") {
  const ShadowingParams shadowing{4.0, 3.0, 0.0};
  const FadingParams fading{1.0, 0.0};
  const CovarianceModel model = build_covariance(shadowing, fading, zero_mean());

  SUBCASE("no measurements: the prior variance") {
    const KrigingEstimate empty(model, MeasurementSet({}, 0.0, Unit::kDb), false);
    CHECK(empty.posterior_variance(Location(1.0)) == doctest::Approx(5.0));
  }

  SUBCASE("noiseless measurement pins the field there") {
    const KrigingEstimate est =
        fit_kriging(model, make_set({Location(2.0)}, Eigen::VectorXd::Ones(1), 0.0));
    CHECK(est.posterior_variance(Location(2.0)) <= 1e-8);
  }

  SUBCASE("shadowing-only variance excludes the fading term at data") {
    const KrigingEstimate est =
        fit_kriging(model, make_set({Location(2.0)}, Eigen::VectorXd::Ones(1), 0.0), true);
    // Fading folds into the noise: residual uncertainty at the sensor is
    // the fading-filtered floor, bounded by sigma_f^2 * sigma_s^2 / (sigma_s^2 + sigma_f^2).
    CHECK(est.posterior_variance(Location(2.0)) <=
          fading.sigma2 * shadowing.sigma2 / (shadowing.sigma2 + fading.sigma2) + 1e-8);
    CHECK(est.posterior_variance(Location(1000.0)) == doctest::Approx(shadowing.sigma2));
  }

  SUBCASE("adding a measurement never increases the variance") {
    const Grid grid(Region(Location(0.0), Location(10.0)), 40);
    const KrigingEstimate one =
        fit_kriging(model, make_set({Location(2.0)}, Eigen::VectorXd::Ones(1), 0.0));
    const KrigingEstimate two = fit_kriging(
        model, make_set({Location(2.0), Location(6.0)}, Eigen::Vector2d(1.0, 0.3), 0.0));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const Location p = grid.point(g);
      CHECK(two.posterior_variance(p) <= one.posterior_variance(p) + 1e-10);
    }
  }
}

TEST_CASE("kriging coincides with covariance-kernel KRR") {
  Rng rng = make_rng(55);

  SUBCASE("zero-mean scenarios") {
    for (int trial = 0; trial < 5; ++trial) {
      const ShadowingParams shadowing{2.0 + trial, 3.0, 0.0};
      const FadingParams fading{0.3 * trial, 0.0};
      const double sigma_z2 = 0.1 + 0.05 * trial;
      const CovarianceModel model = build_covariance(shadowing, fading, zero_mean());
      std::vector<Location> locs;
      for (int i = 0; i < 5; ++i) locs.push_back(Location(uniform_vector(rng, 1, 0.0, 20.0)(0)));
      const Eigen::VectorXd m = normal_vector(rng, 5, 0.0, 2.0);
      std::vector<Location> probes;
      for (int i = 0; i < 30; ++i) probes.push_back(Location(uniform_vector(rng, 1, 0.0, 20.0)(0)));
      const EquivalenceReport report =
          kriging_as_krr_check(model, make_set(locs, m, sigma_z2), probes);
      CHECK(report.max_deviation <= 1e-8);
    }
  }

  SUBCASE("nonzero mean after centering") {
    const ShadowingParams shadowing{4.0, 5.0, 1.0};
    const FadingParams fading{0.0, 0.0};
    const MapFunction mean = path_loss_mean(Location(0.0), 10.0, 2.0, 1e-3, shadowing, fading);
    const CovarianceModel model = build_covariance(shadowing, fading, mean);
    std::vector<Location> locs{Location(1.0), Location(3.0), Location(8.0)};
    const Eigen::Vector3d m(5.0, -1.0, -12.0);
    std::vector<Location> probes;
    for (int i = 0; i < 30; ++i) probes.push_back(Location(uniform_vector(rng, 1, 0.5, 15.0)(0)));
    const EquivalenceReport report = kriging_as_krr_check(model, make_set(locs, m, 0.25), probes);
    CHECK(report.max_deviation <= 1e-8);
  }
}

TEST_CASE("monte carlo: unbiasedness and error orthogonality") {
  const ShadowingParams shadowing{4.0, 3.0, 0.0};
  const FadingParams fading{0.0, 0.0};
  const double sigma_z2 = 0.5;
  const CovarianceModel model = build_covariance(shadowing, fading, zero_mean());

  const Grid grid(Region(Location(0.0), Location(12.0)), 12);
  const std::vector<Location> sensors{grid.point(1), grid.point(4), grid.point(7), grid.point(10)};
  const std::vector<Location> probes{grid.point(2), grid.point(6), grid.point(9)};

  const int replicates = 4000;
  Eigen::VectorXd bias = Eigen::VectorXd::Zero(3);
  // Cross-index residual/measurement products: expectation is zero.
  double cross = 0.0;
  double cross_sq = 0.0;
  int cross_count = 0;

  for (int rep = 0; rep < replicates; ++rep) {
    const GridMap field = sample_shadowing_field(grid, shadowing, 10000 + static_cast<std::uint64_t>(rep));
    Rng rng = make_rng(20000 + static_cast<std::uint64_t>(rep));
    Eigen::VectorXd m(4);
    for (int i = 0; i < 4; ++i) {
      m(i) = field.value_at(sensors[static_cast<std::size_t>(i)]) +
             normal_vector(rng, 1, 0.0, std::sqrt(sigma_z2))(0);
    }
    const KrigingEstimate est = fit_kriging(model, make_set(sensors, m, sigma_z2));
    for (int j = 0; j < 3; ++j) {
      bias(j) += est.evaluate(probes[static_cast<std::size_t>(j)]) -
                 field.value_at(probes[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < 4; ++i) {
      const double resid = m(i) - est.evaluate(sensors[static_cast<std::size_t>(i)]);
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        const double prod = resid * m(j);
        cross += prod;
        cross_sq += prod * prod;
        ++cross_count;
      }
    }
  }
  bias /= replicates;
  const double cross_mean = cross / cross_count;
  const double cross_sd = std::sqrt((cross_sq / cross_count - cross_mean * cross_mean) / cross_count);
  CHECK(std::abs(cross_mean) <= 3.0 * cross_sd);
  // Unbiasedness at each probe within 3 sigma of the Monte-Carlo error.
  const double probe_sd = 3.0 * std::sqrt(shadowing.sigma2 / replicates);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(bias(j)) <= probe_sd);
}

}  // TEST_SUITE
