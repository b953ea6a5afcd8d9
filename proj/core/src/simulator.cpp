#include "radiomap/simulator.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "radiomap/linalg.hpp"
#include "radiomap/propmap.hpp"
#include "radiomap/random.hpp"

namespace radiomap {

void validate(const Environment& env) {
  if (!(env.path_loss_exponent > 0.0)) {
    throw std::invalid_argument("Environment: path loss exponent must be positive");
  }
  if (env.shadowing.sigma2 < 0.0 || env.fading.sigma2 < 0.0) {
    throw std::invalid_argument("Environment: variances must be nonnegative");
  }
  if (!(env.shadowing.decorrelation_distance > 0.0)) {
    throw std::invalid_argument("Environment: decorrelation distance must be positive");
  }
  for (const Transmitter& tx : env.transmitters) {
    for (double c : tx.psd_coefficients) {
      if (c < 0.0) throw std::invalid_argument("Transmitter: PSD coefficients must be nonnegative");
    }
  }
  if (env.slf) {
    if (env.slf->values().minCoeff() < 0.0) {
      throw std::invalid_argument("Environment: SLF values must be nonnegative");
    }
  }
}

double friis_gain(const Location& tx, const Location& rx, double exponent, double min_distance) {
  const double d = std::max(distance(tx, rx), min_distance);
  return 1.0 / std::pow(d, exponent);
}

double path_loss_db(const Location& tx, const Location& rx, double exponent, double min_distance) {
  const double d = std::max(distance(tx, rx), min_distance);
  return -10.0 * exponent * std::log10(d);
}

double gudmundson_covariance(const ShadowingParams& params, double lag) {
  return params.sigma2 * std::exp2(-lag / params.decorrelation_distance);
}

GridMap sample_shadowing_field(const Grid& grid, const ShadowingParams& params, std::uint64_t seed) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  if (params.sigma2 == 0.0) return GridMap(grid, 0.0, Unit::kDb);

  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Location pi = grid.point(static_cast<std::size_t>(i));
    cov(i, i) = params.sigma2;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Location pj = grid.point(static_cast<std::size_t>(j));
      const double c = gudmundson_covariance(params, distance(pi, pj));
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  const Eigen::MatrixXd chol = cholesky_with_jitter(cov);
  Rng rng = make_rng(seed);
  const Eigen::VectorXd white = normal_vector(rng, n);
  return GridMap(grid, chol * white, Unit::kDb);
}

namespace {

std::uint64_t location_bits(const Location& loc) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int a = 0; a < loc.dim(); ++a) {
    std::uint64_t bits;
    const double c = loc[a];
    std::memcpy(&bits, &c, sizeof bits);
    h = (h ^ bits) * 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

EnvironmentRealization::EnvironmentRealization(Environment env, Grid grid)
    : env_(std::move(env)), grid_(grid) {
  validate(env_);
  min_distance_ = grid_.cell_diagonal();
  shadow_field_ = sample_shadowing_field(grid_, env_.shadowing, env_.seed);
  Rng rng = make_rng(derive_seed(env_.seed, 1));
  const Eigen::Index n = static_cast<Eigen::Index>(grid_.size());
  Eigen::VectorXd fading = env_.fading.sigma2 > 0.0
                               ? normal_vector(rng, n, 0.0, std::sqrt(env_.fading.sigma2))
                               : Eigen::VectorXd::Zero(n).eval();
  fading_field_ = GridMap(grid_, std::move(fading), Unit::kDb);
}

EnvironmentRealization::EnvironmentRealization(Environment env, Grid grid, BemBasis basis)
    : EnvironmentRealization(std::move(env), grid) {
  basis_ = std::move(basis);
}

double EnvironmentRealization::shadowing_attenuation_db(const Location& a, const Location& b) const {
  if (env_.slf) {
    const Slf slf(env_.slf->grid(), env_.slf->values());
    return line_integral(slf, a, b, WeightModel{WeightModel::Kind::kPiecewiseConstant, 0.05});
  }
  return env_.shadowing.mean + shadow_field_.value_at(midpoint(a, b));
}

double EnvironmentRealization::gain_db(std::size_t tx_index, const Location& x) const {
  const Transmitter& tx = env_.transmitters.at(tx_index);
  const double l = path_loss_db(tx.location, x, env_.path_loss_exponent, min_distance_);
  const double s = shadowing_attenuation_db(tx.location, x);
  const double xi = env_.fading.mean + fading_field_.value_at(x);
  return l - s - xi;
}

double EnvironmentRealization::link_gain_db(const Location& a, const Location& b) const {
  const double l = path_loss_db(a, b, env_.path_loss_exponent, min_distance_);
  const double s = shadowing_attenuation_db(a, b);
  double xi = env_.fading.mean;
  if (env_.fading.sigma2 > 0.0) {
    // Fading is a property of the (unordered) link in a static snapshot.
    Rng rng = make_rng(derive_seed(env_.seed, 2) ^ (location_bits(a) + location_bits(b)));
    std::normal_distribution<double> dist(0.0, std::sqrt(env_.fading.sigma2));
    xi += dist(rng);
  }
  return l - s - xi;
}

double EnvironmentRealization::transmitter_power_linear(std::size_t tx_index, const BemBasis* basis) const {
  const Transmitter& tx = env_.transmitters.at(tx_index);
  if (basis != nullptr && !tx.psd_coefficients.empty()) {
    if (static_cast<Eigen::Index>(tx.psd_coefficients.size()) != basis->num_bands()) {
      throw std::invalid_argument("transmitter PSD coefficient length does not match the basis");
    }
    const Eigen::VectorXd c =
        Eigen::Map<const Eigen::VectorXd>(tx.psd_coefficients.data(),
                                          static_cast<Eigen::Index>(tx.psd_coefficients.size()));
    return basis->integrate(basis->synthesize(c));
  }
  return db_to_linear(tx.power_db);
}

double EnvironmentRealization::power(const Location& x) const {
  if (env_.transmitters.empty()) throw std::invalid_argument("power: environment has no transmitters");
  double p = 0.0;
  for (std::size_t s = 0; s < env_.transmitters.size(); ++s) {
    p += transmitter_power_linear(s, basis_ ? &*basis_ : nullptr) * db_to_linear(gain_db(s, x));
  }
  return p;
}

GridMap EnvironmentRealization::power_map() const {
  Eigen::VectorXd values(static_cast<Eigen::Index>(grid_.size()));
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    values(static_cast<Eigen::Index>(i)) = power(grid_.point(i));
  }
  return GridMap(grid_, std::move(values), Unit::kLinearWatts);
}

Eigen::VectorXd EnvironmentRealization::psd(const Location& x, const BemBasis& basis) const {
  Eigen::VectorXd total = Eigen::VectorXd::Zero(basis.num_frequencies());
  for (std::size_t s = 0; s < env_.transmitters.size(); ++s) {
    const Transmitter& tx = env_.transmitters[s];
    if (static_cast<Eigen::Index>(tx.psd_coefficients.size()) != basis.num_bands()) {
      throw std::invalid_argument("psd: every transmitter needs coefficients matching the basis");
    }
    const Eigen::VectorXd c =
        Eigen::Map<const Eigen::VectorXd>(tx.psd_coefficients.data(),
                                          static_cast<Eigen::Index>(tx.psd_coefficients.size()));
    total += db_to_linear(gain_db(s, x)) * basis.synthesize(c);
  }
  return total;
}

GridMap true_power_map(const Environment& env, const Grid& grid) {
  return EnvironmentRealization(env, grid).power_map();
}

MeasurementSet draw_measurements(const GridMap& map, const std::vector<Location>& locations,
                                 double noise_variance, std::uint64_t seed) {
  if (noise_variance < 0.0) throw std::invalid_argument("draw_measurements: noise variance < 0");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(noise_variance));
  std::vector<Measurement> ms;
  ms.reserve(locations.size());
  for (const Location& loc : locations) {
    Measurement m;
    m.location = loc;
    m.value = map.value_at(loc) + (noise_variance > 0.0 ? dist(rng) : 0.0);
    ms.push_back(std::move(m));
  }
  return MeasurementSet(std::move(ms), noise_variance, map.unit());
}

MeasurementSet draw_link_measurements(const EnvironmentRealization& realization,
                                      const std::vector<std::pair<Location, Location>>& pairs,
                                      double noise_variance, std::uint64_t seed) {
  if (noise_variance < 0.0) throw std::invalid_argument("draw_link_measurements: noise variance < 0");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(noise_variance));
  std::vector<Measurement> ms;
  ms.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    Measurement m;
    m.location = a;
    m.second_location = b;
    m.value = realization.link_gain_db(a, b) + (noise_variance > 0.0 ? dist(rng) : 0.0);
    ms.push_back(std::move(m));
  }
  return MeasurementSet(std::move(ms), noise_variance, Unit::kDb);
}

PsdMeasurementSet draw_psd_measurements(const EnvironmentRealization& realization, const BemBasis& basis,
                                        const std::vector<Location>& locations, double noise_variance,
                                        std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> dist(0.0, std::sqrt(noise_variance));
  Eigen::MatrixXd psd(static_cast<Eigen::Index>(locations.size()), basis.num_frequencies());
  for (std::size_t n = 0; n < locations.size(); ++n) {
    Eigen::VectorXd row = realization.psd(locations[n], basis);
    if (noise_variance > 0.0) {
      for (Eigen::Index f = 0; f < row.size(); ++f) row(f) = std::max(0.0, row(f) + dist(rng));
    }
    psd.row(static_cast<Eigen::Index>(n)) = row.transpose();
  }
  return PsdMeasurementSet(locations, std::move(psd), noise_variance);
}

}  // namespace radiomap
