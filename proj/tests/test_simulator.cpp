#include <cmath>

#include "doctest.h"
#include "radiomap/propmap.hpp"
#include "radiomap/random.hpp"
#include "radiomap/simulator.hpp"

using namespace radiomap;

namespace {

Environment basic_env(double exponent = 2.0) {
  Environment env;
  Transmitter tx;
  tx.location = Location(0.5);
  tx.power_db = 0.0;  // 1 W
  env.transmitters.push_back(tx);
  env.path_loss_exponent = exponent;
  return env;
}

/// Dense quadrature of (1/sqrt(L)) * integral of F along [a, b], with F
/// read as the piecewise-constant cell value. Independent of the
/// traversal code under test.
double quadrature_line_integral(const GridMap& slf, const Location& a, const Location& b, int samples) {
  const double length = distance(a, b);
  double acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / samples;
    std::array<double, 3> c{};
    for (int axis = 0; axis < a.dim(); ++axis) c[static_cast<std::size_t>(axis)] = a[axis] + t * (b[axis] - a[axis]);
    const Location p(std::span<const double>(c.data(), static_cast<std::size_t>(a.dim())));
    if (!slf.grid().region().contains(p)) continue;
    acc += slf.value_at(p) * (length / samples);
  }
  return acc / std::sqrt(length);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("friis gain") {
  CHECK(friis_gain(Location(0.0), Location(2.0), 2.0, 1e-9) == doctest::Approx(0.25));
  CHECK(friis_gain(Location(0.0), Location(1.0), 3.7, 1e-9) == doctest::Approx(1.0));
  CHECK(friis_gain(Location(0.0), Location(10.0), 3.0, 1e-9) == doctest::Approx(1e-3));
  // Distance floor guards the singularity.
  CHECK(friis_gain(Location(0.0), Location(0.0), 2.0, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("shadowing field: zero variance gives the zero field") {
  const Grid g(Region(Location(0.0), Location(10.0)), 8);
  ShadowingParams params;
  params.sigma2 = 0.0;
  const GridMap field = sample_shadowing_field(g, params, 7);
  CHECK(field.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shadowing field matches the Gudmundson statistics") {
  // 1D grid with spacing delta_c: covariance at one-cell lag must be
  // sigma^2 / 2 (the model's 50% decay distance).
  ShadowingParams params;
  params.sigma2 = 4.0;
  params.decorrelation_distance = 2.0;
  const int cells = 6;
  const Grid g(Region(Location(0.0), Location(cells * params.decorrelation_distance)), cells);

  const int draws = 2000;
  double lag0 = 0.0, lag1 = 0.0;
  int count0 = 0, count1 = 0;
  for (int d = 0; d < draws; ++d) {
    const GridMap field = sample_shadowing_field(g, params, 1000 + static_cast<std::uint64_t>(d));
    for (int i = 0; i < cells; ++i) {
      lag0 += field.at(static_cast<std::size_t>(i)) * field.at(static_cast<std::size_t>(i));
      ++count0;
      if (i + 1 < cells) {
        lag1 += field.at(static_cast<std::size_t>(i)) * field.at(static_cast<std::size_t>(i + 1));
        ++count1;
      }
    }
  }
  lag0 /= count0;
  lag1 /= count1;
  CHECK(lag0 == doctest::Approx(params.sigma2).epsilon(0.10));
  CHECK(lag1 == doctest::Approx(params.sigma2 / 2.0).epsilon(0.10));
}

TEST_CASE("fading field is spatially white") {
  Environment env = basic_env();
  env.fading.sigma2 = 9.0;
  const Grid g(Region(Location(0.0), Location(64.0)), 64);
  double corr = 0.0, var = 0.0;
  const int draws = 400;
  for (int d = 0; d < draws; ++d) {
    env.seed = static_cast<std::uint64_t>(d);
    const EnvironmentRealization real(env, g);
    const Eigen::VectorXd& f = real.fading_field().values();
    for (int i = 0; i + 1 < 64; ++i) {
      corr += f(i) * f(i + 1);
      var += f(i) * f(i);
    }
  }
  CHECK(std::abs(corr / var) < 0.05);
}

TEST_CASE("true power map: single transmitter free space") {
  Environment env = basic_env();
  const Grid g(Region(Location(0.0), Location(8.0)), 8);  // centers 0.5 .. 7.5
  const GridMap map = true_power_map(env, g);
  // Point at 2.5 is at distance 2 from the transmitter.
  CHECK(map.at(2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(map.at(0) == doctest::Approx(1.0).epsilon(1e-12));  // clamped to the distance floor
}

TEST_CASE("true power map superposes over transmitters") {
  const Grid g(Region(Location(0.0, 0.0), Location(8.0, 8.0)), 8, 8);
  Environment both;
  both.path_loss_exponent = 2.2;
  both.shadowing = {3.0, 4.0, 1.0};
  both.fading = {0.5, 0.25};
  both.seed = 99;
  Transmitter t1, t2;
  t1.location = Location(1.5, 1.5);
  t1.power_db = 3.0;
  t2.location = Location(6.5, 6.5);
  t2.power_db = -2.0;
  both.transmitters = {t1, t2};

  Environment only1 = both, only2 = both;
  only1.transmitters = {t1};
  only2.transmitters = {t2};

  const GridMap sum = true_power_map(both, g);
  const GridMap a = true_power_map(only1, g);
  const GridMap b = true_power_map(only2, g);
  CHECK((sum.values() - a.values() - b.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("uniform SLF attenuates per the tomographic line integral") {
  const Grid g(Region(Location(0.0, 0.0), Location(8.0, 8.0)), 8, 8);
  const double c = 0.7;
  Environment env;
  Transmitter tx;
  tx.location = Location(0.5, 0.5);
  env.transmitters.push_back(tx);
  env.slf = GridMap(g, c, Unit::kDb);

  const EnvironmentRealization real(env, g);
  const Location rx(6.5, 4.5);
  const double d = distance(tx.location, rx);
  const double expected_gain =
      path_loss_db(tx.location, rx, 2.0, g.cell_diagonal()) - c * std::sqrt(d);
  CHECK(real.gain_db(0, rx) == doctest::Approx(expected_gain).epsilon(1e-9));

  // Quadrature oracle for a non-uniform field.
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  values(27) = 2.0;
  values(36) = 1.25;
  const GridMap slf_map(g, values, Unit::kDb);
  const Slf slf(g, values);
  const double direct =
      line_integral(slf, tx.location, rx, {WeightModel::Kind::kPiecewiseConstant, 0.05});
  const double oracle = quadrature_line_integral(slf_map, tx.location, rx, 200000);
  CHECK(direct == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("draw_measurements noise statistics") {
  Environment env = basic_env();
  const Grid g(Region(Location(0.0), Location(8.0)), 8);
  const GridMap map = true_power_map(env, g);
  const std::vector<Location> locs{Location(2.5), Location(4.5)};

  SUBCASE("zero noise reproduces the map") {
    const MeasurementSet ms = draw_measurements(map, locs, 0.0, 5);
    CHECK(ms[0].value == map.at(2));
    CHECK(ms[1].value == map.at(4));
    CHECK(ms.unit() == Unit::kLinearWatts);
  }

  SUBCASE("noise is zero-mean with the requested variance") {
    const double sigma2 = 0.04;
    const int draws = 10000;
    double sum = 0.0, sumsq = 0.0;
    for (int d = 0; d < draws; ++d) {
      const MeasurementSet ms = draw_measurements(map, {Location(2.5)}, sigma2,
                                                  static_cast<std::uint64_t>(d));
      const double err = ms[0].value - map.at(2);
      sum += err;
      sumsq += err * err;
    }
    const double mean = sum / draws;
    const double var = sumsq / draws - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(sigma2) / 100.0);
    CHECK(var == doctest::Approx(sigma2).epsilon(0.05));
  }
}

TEST_CASE("link measurements") {
  const Grid g(Region(Location(0.0, 0.0), Location(8.0, 8.0)), 16, 16);
  Environment env;
  Transmitter tx;
  tx.location = Location(0.5, 0.5);
  env.transmitters.push_back(tx);
  env.shadowing = {2.0, 3.0, 0.5};
  env.fading = {1.0, 0.0};
  env.seed = 11;
  const EnvironmentRealization real(env, g);

  SUBCASE("link gain is reciprocal") {
    const Location a(1.1, 2.3), b(6.0, 7.2);
    CHECK(real.link_gain_db(a, b) == doctest::Approx(real.link_gain_db(b, a)).epsilon(1e-12));
  }

  SUBCASE("zero-noise free-space link at unit distance has 0 dB gain") {
    Environment fs;
    fs.transmitters.push_back(tx);
    const EnvironmentRealization free_space(fs, g);
    const MeasurementSet ms =
        draw_link_measurements(free_space, {{Location(2.0, 2.0), Location(3.0, 2.0)}}, 0.0, 3);
    CHECK(ms[0].value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ms.unit() == Unit::kDb);
    CHECK(ms.is_link_set());
  }

  SUBCASE("link crossing an SLF cell matches the quadrature oracle") {
    Environment with_slf;
    with_slf.transmitters.push_back(tx);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    values(5 * 16 + 7) = 1.0;
    with_slf.slf = GridMap(g, values, Unit::kDb);
    const EnvironmentRealization real2(with_slf, g);
    const Location a(0.25, 1.25), b(7.75, 6.25);
    const MeasurementSet ms = draw_link_measurements(real2, {{a, b}}, 0.0, 4);
    const double expected = path_loss_db(a, b, 2.0, g.cell_diagonal()) -
                            quadrature_line_integral(*with_slf.slf, a, b, 200000);
    CHECK(ms[0].value == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("psd sampling") {
  Eigen::VectorXd freqs = Eigen::VectorXd::LinSpaced(32, 0.0, 31.0);
  Eigen::VectorXd centers(2);
  centers << 8.0, 24.0;
  const BemBasis basis = raised_cosine_basis(freqs, centers, 10.0, 0.3);

  const Grid g(Region(Location(0.0), Location(8.0)), 8);
  Environment env;
  Transmitter tx;
  tx.location = Location(0.5);
  tx.psd_coefficients = {2.0, 0.5};
  env.transmitters.push_back(tx);

  SUBCASE("single transmitter, unit gain") {
    const EnvironmentRealization real(env, g, basis);
    // At the distance floor the gain is exactly 1.
    const Eigen::VectorXd psd = real.psd(Location(0.5), basis);
    const Eigen::VectorXd expected = 2.0 * basis.curves().row(0).transpose() +
                                     0.5 * basis.curves().row(1).transpose();
    CHECK((psd - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("two transmitters superpose") {
    Transmitter tx2;
    tx2.location = Location(7.5);
    tx2.psd_coefficients = {0.0, 1.0};
    Environment two = env;
    two.transmitters.push_back(tx2);
    Environment only2;
    only2.transmitters.push_back(tx2);

    const Location probe(4.5);
    const Eigen::VectorXd sum = EnvironmentRealization(two, g, basis).psd(probe, basis);
    const Eigen::VectorXd a = EnvironmentRealization(env, g, basis).psd(probe, basis);
    const Eigen::VectorXd b = EnvironmentRealization(only2, g, basis).psd(probe, basis);
    CHECK((sum - a - b).cwiseAbs().maxCoeff() < 1e-15);
  }

  SUBCASE("PSD integrates to the power map value") {
    env.shadowing = {1.5, 2.0, 0.25};
    env.seed = 21;
    const EnvironmentRealization real(env, g, basis);
    const Location probe(3.5);
    const double integral = basis.integrate(real.psd(probe, basis));
    CHECK(integral == doctest::Approx(real.power(probe)).epsilon(1e-12));
  }

  SUBCASE("mismatched coefficient length throws") {
    Environment bad = env;
    bad.transmitters[0].psd_coefficients = {1.0};
    const EnvironmentRealization real(bad, g);
    CHECK_THROWS(real.psd(Location(0.5), basis));
  }
}

TEST_CASE("realizations are deterministic in the seed") {
  Environment env = basic_env();
  env.shadowing = {2.0, 1.0, 0.0};
  env.fading = {1.0, 0.0};
  env.seed = 1234;
  const Grid g(Region(Location(0.0), Location(8.0)), 16);
  const GridMap a = true_power_map(env, g);
  const GridMap b = true_power_map(env, g);
  CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() == 0.0);
  env.seed = 1235;
  const GridMap c = true_power_map(env, g);
  CHECK((a.values() - c.values()).cwiseAbs().maxCoeff() > 0.0);
}

}  // TEST_SUITE
