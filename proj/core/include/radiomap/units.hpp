#pragma once

#include <cmath>
#include <stdexcept>

namespace radiomap {

/// Unit tag for power values. Conversions are always explicit; mixing
/// tags without conversion is rejected by the containers.
enum class Unit { kLinearWatts, kDb };

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw std::domain_error("linear_to_db: input must be positive");
  return 10.0 * std::log10(linear);
}

}  // namespace radiomap
