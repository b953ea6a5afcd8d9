#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "radiomap/gridmap.hpp"
#include "radiomap/measurement.hpp"
#include "radiomap/psd.hpp"

namespace radiomap {

struct Transmitter {
  Location location;
  double power_db = 0.0;
  /// Nonnegative BEM coefficients; empty for frequency-flat sources.
  std::vector<double> psd_coefficients;
};

/// Gudmundson shadowing: Cov[s(x),s(x')] = sigma2 * 2^(-d/decorrelation_distance).
struct ShadowingParams {
  double sigma2 = 0.0;                  // dB^2
  double decorrelation_distance = 1.0;  // meters, distance of 50% correlation decay
  double mean = 0.0;                    // dB
};

/// Spatially white fast fading.
struct FadingParams {
  double sigma2 = 0.0;  // dB^2
  double mean = 0.0;    // dB
};

struct Environment {
  std::vector<Transmitter> transmitters;
  double path_loss_exponent = 2.0;
  ShadowingParams shadowing;
  FadingParams fading;
  /// Nonnegative spatial loss field; when set, link shadowing comes from
  /// its line integrals instead of the sampled Gudmundson field.
  std::optional<GridMap> slf;
  std::uint64_t seed = 0;
};

void validate(const Environment& env);

/// Free-space style gain 1/d^exponent with a distance floor.
double friis_gain(const Location& tx, const Location& rx, double exponent, double min_distance);
/// The same gain in dB: -10 * exponent * log10(max(d, min_distance)).
double path_loss_db(const Location& tx, const Location& rx, double exponent, double min_distance);

double gudmundson_covariance(const ShadowingParams& params, double lag);

/// One zero-mean draw of a Gaussian field with the Gudmundson
/// covariance on the grid points. Factors the full covariance matrix;
/// practical up to roughly 1e4 grid points.
GridMap sample_shadowing_field(const Grid& grid, const ShadowingParams& params, std::uint64_t seed);

/// A sampled ground-truth realization: one shadowing field draw, one
/// fading field draw, fixed for the lifetime of the object. All
/// evaluations are deterministic; the same (environment, grid) pair
/// reproduces the same realization bit for bit.
class EnvironmentRealization {
 public:
  EnvironmentRealization(Environment env, Grid grid);
  /// With a basis, transmitter powers come from their PSD integrals.
  EnvironmentRealization(Environment env, Grid grid, BemBasis basis);

  const Environment& environment() const { return env_; }
  const Grid& grid() const { return grid_; }
  const GridMap& shadow_field() const { return shadow_field_; }  // zero-mean, dB
  const GridMap& fading_field() const { return fading_field_; }  // zero-mean, dB
  double min_distance() const { return min_distance_; }

  /// Channel gain in dB from transmitter t to location x, including
  /// path loss, shadowing (field or SLF line integral), and fading.
  double gain_db(std::size_t tx_index, const Location& x) const;
  /// Link gain in dB between two arbitrary locations. Symmetric in its
  /// arguments; fading is tied to the (unordered) link.
  double link_gain_db(const Location& a, const Location& b) const;

  /// Received power in linear watts (sum over transmitters).
  double power(const Location& x) const;
  GridMap power_map() const;

  /// PSD sampled on the basis frequency grid; requires all transmitters
  /// to carry coefficients of matching length.
  Eigen::VectorXd psd(const Location& x, const BemBasis& basis) const;
  /// Total transmit power of one source (integral of its PSD when
  /// coefficients are present, otherwise 10^(power_db/10)).
  double transmitter_power_linear(std::size_t tx_index, const BemBasis* basis) const;

 private:
  double shadowing_attenuation_db(const Location& a, const Location& b) const;

  Environment env_;
  Grid grid_;
  std::optional<BemBasis> basis_;
  GridMap shadow_field_;
  GridMap fading_field_;
  double min_distance_ = 0.0;
};

/// Ground-truth power map of an environment on a grid (linear watts).
GridMap true_power_map(const Environment& env, const Grid& grid);

/// Noisy point measurements of a map: value at the nearest grid point
/// plus zero-mean Gaussian noise, independent per measurement.
MeasurementSet draw_measurements(const GridMap& map, const std::vector<Location>& locations,
                                 double noise_variance, std::uint64_t seed);

/// Noisy link-gain measurements (dB) between location pairs.
MeasurementSet draw_link_measurements(const EnvironmentRealization& realization,
                                      const std::vector<std::pair<Location, Location>>& pairs,
                                      double noise_variance, std::uint64_t seed);

/// PSD measurement vectors at the given locations with i.i.d. Gaussian
/// noise per (location, frequency) entry, clamped at zero.
PsdMeasurementSet draw_psd_measurements(const EnvironmentRealization& realization, const BemBasis& basis,
                                        const std::vector<Location>& locations, double noise_variance,
                                        std::uint64_t seed);

}  // namespace radiomap
