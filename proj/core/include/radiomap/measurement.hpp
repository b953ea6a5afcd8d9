#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "radiomap/geometry.hpp"
#include "radiomap/units.hpp"

namespace radiomap {

/// One sensor reading. second_location is set only for propagation-map
/// (link) datasets.
struct Measurement {
  Location location;
  double value = 0.0;
  std::optional<Location> second_location;
  std::optional<int> frequency_index;
  std::optional<int> time_index;
};

/// Ordered measurement collection with shared noise variance and unit.
class MeasurementSet {
 public:
  MeasurementSet() = default;
  MeasurementSet(std::vector<Measurement> measurements, double noise_variance, Unit unit);

  const std::vector<Measurement>& measurements() const { return measurements_; }
  std::size_t size() const { return measurements_.size(); }
  bool empty() const { return measurements_.empty(); }
  const Measurement& operator[](std::size_t i) const { return measurements_[i]; }
  double noise_variance() const { return noise_variance_; }
  Unit unit() const { return unit_; }
  bool is_link_set() const;

  std::vector<Location> locations() const;
  std::vector<double> values() const;

  void append(Measurement m);

 private:
  void validate(const Measurement& m) const;

  std::vector<Measurement> measurements_;
  double noise_variance_ = 0.0;
  Unit unit_ = Unit::kLinearWatts;
};

/// CSV contract: header `x,y,z,x2,y2,z2,value,freq,time`; unused
/// columns stay empty; '.' decimal separator; UTF-8.
void save_measurements(const MeasurementSet& set, const std::string& path);
MeasurementSet load_measurements(const std::string& path, double noise_variance, Unit unit);
void write_measurements(const MeasurementSet& set, std::ostream& os);
MeasurementSet read_measurements(std::istream& is, double noise_variance, Unit unit);

}  // namespace radiomap
