#include "radiomap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace radiomap {

namespace {

void check_finite(std::span<const double> coords) {
  for (double c : coords) {
    if (!std::isfinite(c)) throw std::invalid_argument("Location coordinates must be finite");
  }
}

}  // namespace

Location::Location(double x) : coords_{x, 0.0, 0.0}, dim_(1) { check_finite(coords()); }
Location::Location(double x, double y) : coords_{x, y, 0.0}, dim_(2) { check_finite(coords()); }
Location::Location(double x, double y, double z) : coords_{x, y, z}, dim_(3) { check_finite(coords()); }

Location::Location(std::span<const double> coords) {
  if (coords.empty() || coords.size() > 3) {
    throw std::invalid_argument("Location dimension must be 1, 2, or 3");
  }
  dim_ = static_cast<int>(coords.size());
  std::copy(coords.begin(), coords.end(), coords_.begin());
  check_finite(this->coords());
}

bool Location::operator==(const Location& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (coords_[static_cast<std::size_t>(a)] != other.coords_[static_cast<std::size_t>(a)]) return false;
  }
  return true;
}

double distance(const Location& a, const Location& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("distance: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Location midpoint(const Location& a, const Location& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("midpoint: dimension mismatch");
  std::array<double, 3> m{};
  for (int i = 0; i < a.dim(); ++i) m[static_cast<std::size_t>(i)] = 0.5 * (a[i] + b[i]);
  return Location(std::span<const double>(m.data(), static_cast<std::size_t>(a.dim())));
}

Region::Region(Location lo, Location hi) : lower(lo), upper(hi) {
  if (lo.dim() != hi.dim()) throw std::invalid_argument("Region: dimension mismatch");
  for (int a = 0; a < lo.dim(); ++a) {
    if (lower[a] > upper[a]) throw std::invalid_argument("Region: lower must not exceed upper");
  }
}

bool Region::contains(const Location& loc) const {
  if (loc.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (loc[a] < lower[a] || loc[a] > upper[a]) return false;
  }
  return true;
}

Location Region::clamp(const Location& loc) const {
  if (loc.dim() != dim()) throw std::invalid_argument("Region::clamp: dimension mismatch");
  std::array<double, 3> c{};
  for (int a = 0; a < dim(); ++a) {
    c[static_cast<std::size_t>(a)] = std::clamp(loc[a], lower[a], upper[a]);
  }
  return Location(std::span<const double>(c.data(), static_cast<std::size_t>(dim())));
}

Grid::Grid(Region region, std::span<const int> counts) : region_(region) {
  if (static_cast<int>(counts.size()) != region.dim()) {
    throw std::invalid_argument("Grid: counts must match region dimension");
  }
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] <= 0) throw std::invalid_argument("Grid: cell counts must be positive");
    counts_[a] = counts[a];
  }
}

Grid::Grid(Region region, int nx) : Grid(region, std::array<int, 1>{nx}) {}
Grid::Grid(Region region, int nx, int ny) : Grid(region, std::array<int, 2>{nx, ny}) {}
Grid::Grid(Region region, int nx, int ny, int nz) : Grid(region, std::array<int, 3>{nx, ny, nz}) {}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim(); ++a) n *= static_cast<std::size_t>(count(a));
  return n;
}

double Grid::cell_size(int axis) const {
  return region_.extent(axis) / static_cast<double>(count(axis));
}

double Grid::cell_diagonal() const {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) s += cell_size(a) * cell_size(a);
  return std::sqrt(s);
}

Location Grid::point(std::size_t linear_index) const {
  const auto mi = multi_index(linear_index);
  std::array<double, 3> c{};
  for (int a = 0; a < dim(); ++a) {
    c[static_cast<std::size_t>(a)] =
        region_.lower[a] + (static_cast<double>(mi[static_cast<std::size_t>(a)]) + 0.5) * cell_size(a);
  }
  return Location(std::span<const double>(c.data(), static_cast<std::size_t>(dim())));
}

std::size_t Grid::linear_index(std::span<const int> multi_index) const {
  if (static_cast<int>(multi_index.size()) != dim()) {
    throw std::invalid_argument("Grid::linear_index: index dimension mismatch");
  }
  std::size_t idx = 0;
  for (int a = 0; a < dim(); ++a) {
    const int i = multi_index[static_cast<std::size_t>(a)];
    if (i < 0 || i >= count(a)) throw std::out_of_range("Grid::linear_index: index out of range");
    idx = idx * static_cast<std::size_t>(count(a)) + static_cast<std::size_t>(i);
  }
  return idx;
}

std::array<int, 3> Grid::multi_index(std::size_t linear_index) const {
  if (linear_index >= size()) throw std::out_of_range("Grid::multi_index: index out of range");
  std::array<int, 3> mi{0, 0, 0};
  for (int a = dim() - 1; a >= 0; --a) {
    mi[static_cast<std::size_t>(a)] = static_cast<int>(linear_index % static_cast<std::size_t>(count(a)));
    linear_index /= static_cast<std::size_t>(count(a));
  }
  return mi;
}

bool Grid::operator==(const Grid& other) const {
  if (dim() != other.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (count(a) != other.count(a)) return false;
    if (region_.lower[a] != other.region_.lower[a]) return false;
    if (region_.upper[a] != other.region_.upper[a]) return false;
  }
  return true;
}

std::vector<Location> grid_points(const Grid& grid) {
  std::vector<Location> pts;
  pts.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back(grid.point(i));
  return pts;
}

std::size_t nearest_grid_point(const Grid& grid, const Location& loc) {
  const Location c = grid.region().clamp(loc);
  std::array<int, 3> mi{0, 0, 0};
  for (int a = 0; a < grid.dim(); ++a) {
    // Nearest cell center along this axis; boundary ties go to the lower cell.
    const double f = (c[a] - grid.region().lower[a]) / grid.cell_size(a) - 0.5;
    int i = static_cast<int>(std::ceil(f - 0.5));
    i = std::clamp(i, 0, grid.count(a) - 1);
    mi[static_cast<std::size_t>(a)] = i;
  }
  return grid.linear_index(std::span<const int>(mi.data(), static_cast<std::size_t>(grid.dim())));
}

}  // namespace radiomap
