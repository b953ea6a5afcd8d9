#include "radiomap/measurement.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace radiomap {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MeasurementSet::MeasurementSet(std::vector<Measurement> measurements, double noise_variance, Unit unit)
    : measurements_(std::move(measurements)), noise_variance_(noise_variance), unit_(unit) {
  if (noise_variance_ < 0.0) throw std::invalid_argument("MeasurementSet: noise variance must be >= 0");
  for (const Measurement& m : measurements_) validate(m);
}

void MeasurementSet::validate(const Measurement& m) const {
  if (!std::isfinite(m.value)) throw std::invalid_argument("Measurement value must be finite");
  if (!measurements_.empty()) {
    const Measurement& first = measurements_.front();
    if (m.location.dim() != first.location.dim()) {
      throw std::invalid_argument("MeasurementSet: mixed location dimensions");
    }
    if (m.second_location.has_value() != first.second_location.has_value()) {
      throw std::invalid_argument("MeasurementSet: link and point measurements cannot be mixed");
    }
  }
}

bool MeasurementSet::is_link_set() const {
  return !measurements_.empty() && measurements_.front().second_location.has_value();
}

std::vector<Location> MeasurementSet::locations() const {
  std::vector<Location> locs;
  locs.reserve(measurements_.size());
  for (const Measurement& m : measurements_) locs.push_back(m.location);
  return locs;
}

std::vector<double> MeasurementSet::values() const {
  std::vector<double> vals;
  vals.reserve(measurements_.size());
  for (const Measurement& m : measurements_) vals.push_back(m.value);
  return vals;
}

void MeasurementSet::append(Measurement m) {
  validate(m);
  measurements_.push_back(std::move(m));
}

void write_measurements(const MeasurementSet& set, std::ostream& os) {
  os << "x,y,z,x2,y2,z2,value,freq,time\n";
  for (const Measurement& m : set.measurements()) {
    std::array<std::string, 9> cols;
    for (int a = 0; a < m.location.dim(); ++a) cols[static_cast<std::size_t>(a)] = format_double(m.location[a]);
    if (m.second_location) {
      for (int a = 0; a < m.second_location->dim(); ++a) {
        cols[static_cast<std::size_t>(3 + a)] = format_double((*m.second_location)[a]);
      }
    }
    cols[6] = format_double(m.value);
    if (m.frequency_index) cols[7] = std::to_string(*m.frequency_index);
    if (m.time_index) cols[8] = std::to_string(*m.time_index);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      os << cols[c];
    }
    os << "\n";
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  // Trailing empty fields are dropped by getline; pad back.
  while (out.size() < 9) out.emplace_back();
  return out;
}

std::optional<Location> parse_location(const std::string& x, const std::string& y, const std::string& z) {
  std::vector<double> coords;
  if (!x.empty()) coords.push_back(std::stod(x));
  if (!y.empty()) coords.push_back(std::stod(y));
  if (!z.empty()) coords.push_back(std::stod(z));
  if (coords.empty()) return std::nullopt;
  return Location(std::span<const double>(coords));
}

}  // namespace

MeasurementSet read_measurements(std::istream& is, double noise_variance, Unit unit) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("measurement csv: empty stream");
  if (line.rfind("x,y,z", 0) != 0) throw std::runtime_error("measurement csv: unexpected header");
  std::vector<Measurement> ms;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    Measurement m;
    const auto loc = parse_location(cols[0], cols[1], cols[2]);
    if (!loc) throw std::runtime_error("measurement csv: row without location");
    m.location = *loc;
    m.second_location = parse_location(cols[3], cols[4], cols[5]);
    m.value = std::stod(cols[6]);
    if (!cols[7].empty()) m.frequency_index = std::stoi(cols[7]);
    if (!cols[8].empty()) m.time_index = std::stoi(cols[8]);
    ms.push_back(std::move(m));
  }
  return MeasurementSet(std::move(ms), noise_variance, unit);
}

void save_measurements(const MeasurementSet& set, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_measurements(set, os);
}

MeasurementSet load_measurements(const std::string& path, double noise_variance, Unit unit) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_measurements(is, noise_variance, unit);
}

}  // namespace radiomap
