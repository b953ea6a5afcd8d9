#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace radiomap {

/// A point in 1D/2D/3D space, coordinates in meters.
class Location {
 public:
  Location() = default;
  explicit Location(double x);
  Location(double x, double y);
  Location(double x, double y, double z);
  Location(std::span<const double> coords);

  int dim() const { return dim_; }
  double operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
  double& operator[](int axis) { return coords_[static_cast<std::size_t>(axis)]; }
  std::span<const double> coords() const { return {coords_.data(), static_cast<std::size_t>(dim_)}; }

  bool operator==(const Location& other) const;

 private:
  std::array<double, 3> coords_{0.0, 0.0, 0.0};
  int dim_ = 0;
};

double distance(const Location& a, const Location& b);
Location midpoint(const Location& a, const Location& b);

/// Axis-aligned box delimiting the region of interest.
struct Region {
  Location lower;
  Location upper;

  Region() = default;
  Region(Location lo, Location hi);

  int dim() const { return lower.dim(); }
  bool contains(const Location& loc) const;
  Location clamp(const Location& loc) const;
  double extent(int axis) const { return upper[axis] - lower[axis]; }
};

/// Regular cell-centered grid over a region. Point (i,j,k) sits at
/// lower + (i+1/2, j+1/2, k+1/2) * cell_size. Linear indices are
/// row-major with axis 0 slowest.
class Grid {
 public:
  Grid() = default;
  Grid(Region region, std::span<const int> counts);
  Grid(Region region, int nx);
  Grid(Region region, int nx, int ny);
  Grid(Region region, int nx, int ny, int nz);

  const Region& region() const { return region_; }
  int dim() const { return region_.dim(); }
  int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const;
  double cell_size(int axis) const;
  /// Diagonal of one cell; used as the default distance floor.
  double cell_diagonal() const;

  Location point(std::size_t linear_index) const;
  std::size_t linear_index(std::span<const int> multi_index) const;
  std::array<int, 3> multi_index(std::size_t linear_index) const;

  bool operator==(const Grid& other) const;

 private:
  Region region_;
  std::array<int, 3> counts_{1, 1, 1};
};

/// All grid points in row-major order (axis 0 slowest). Deterministic.
std::vector<Location> grid_points(const Grid& grid);

/// Index of the grid point nearest to loc (Euclidean). Out-of-region
/// locations are clamped to the region first; equidistant ties resolve
/// to the lowest index.
std::size_t nearest_grid_point(const Grid& grid, const Location& loc);

}  // namespace radiomap
