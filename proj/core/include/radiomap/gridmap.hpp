#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

#include "radiomap/geometry.hpp"
#include "radiomap/units.hpp"

namespace radiomap {

/// Per-cell values on a grid with an explicit unit tag. Immutable by
/// convention after construction.
class GridMap {
 public:
  GridMap() = default;
  GridMap(Grid grid, Eigen::VectorXd values, Unit unit);
  /// Constant-valued map.
  GridMap(Grid grid, double fill, Unit unit);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  Unit unit() const { return unit_; }

  double at(std::size_t linear_index) const { return values_(static_cast<Eigen::Index>(linear_index)); }
  /// Value of the nearest grid point (piecewise-constant evaluation).
  double value_at(const Location& loc) const;

  /// 2D view of the values with axis 0 as rows (row-major linear order).
  Eigen::MatrixXd as_matrix() const;
  static GridMap from_matrix(const Grid& grid, const Eigen::MatrixXd& m, Unit unit);

  GridMap to_db() const;
  GridMap to_linear() const;

 private:
  Grid grid_;
  Eigen::VectorXd values_;
  Unit unit_ = Unit::kLinearWatts;
};

/// File format: one JSON header line {region, counts, unit}, then the
/// value matrix as CSV (rows over axis 0).
void save_gridmap(const GridMap& map, const std::string& path);
GridMap load_gridmap(const std::string& path);
void write_gridmap(const GridMap& map, std::ostream& os);
GridMap read_gridmap(std::istream& is);

double mse(const GridMap& a, const GridMap& b);
double mae(const GridMap& a, const GridMap& b);

}  // namespace radiomap
