#include "radiomap/gridmap.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace radiomap {

using json = nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GridMap::GridMap(Grid grid, Eigen::VectorXd values, Unit unit)
    : grid_(grid), values_(std::move(values)), unit_(unit) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw std::invalid_argument("GridMap: values length must equal grid point count");
  }
}

GridMap::GridMap(Grid grid, double fill, Unit unit)
    : grid_(grid),
      values_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), fill)),
      unit_(unit) {}

double GridMap::value_at(const Location& loc) const {
  return at(nearest_grid_point(grid_, loc));
}

Eigen::MatrixXd GridMap::as_matrix() const {
  const Eigen::Index rows = grid_.count(0);
  const Eigen::Index cols = static_cast<Eigen::Index>(grid_.size()) / rows;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = values_(i * cols + j);
  return m;
}

GridMap GridMap::from_matrix(const Grid& grid, const Eigen::MatrixXd& m, Unit unit) {
  const Eigen::Index rows = grid.count(0);
  const Eigen::Index cols = static_cast<Eigen::Index>(grid.size()) / rows;
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument("GridMap::from_matrix: shape mismatch");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) v(i * cols + j) = m(i, j);
  return GridMap(grid, std::move(v), unit);
}

GridMap GridMap::to_db() const {
  if (unit_ == Unit::kDb) return *this;
  Eigen::VectorXd v(values_.size());
  for (Eigen::Index i = 0; i < values_.size(); ++i) v(i) = linear_to_db(values_(i));
  return GridMap(grid_, std::move(v), Unit::kDb);
}

GridMap GridMap::to_linear() const {
  if (unit_ == Unit::kLinearWatts) return *this;
  Eigen::VectorXd v(values_.size());
  for (Eigen::Index i = 0; i < values_.size(); ++i) v(i) = db_to_linear(values_(i));
  return GridMap(grid_, std::move(v), Unit::kLinearWatts);
}

void write_gridmap(const GridMap& map, std::ostream& os) {
  const Grid& g = map.grid();
  json header;
  json lower = json::array(), upper = json::array(), counts = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    lower.push_back(g.region().lower[a]);
    upper.push_back(g.region().upper[a]);
    counts.push_back(g.count(a));
  }
  header["region"] = {{"lower", lower}, {"upper", upper}};
  header["counts"] = counts;
  header["unit"] = map.unit() == Unit::kDb ? "db" : "watts";
  os << header.dump() << "\n";

  const Eigen::Index cols = static_cast<Eigen::Index>(g.size()) / g.count(0);
  for (Eigen::Index i = 0; i < g.count(0); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (j) os << ',';
      os << format_double(map.values()(i * cols + j));
    }
    os << "\n";
  }
}

GridMap read_gridmap(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("gridmap: missing JSON header");
  const json header = json::parse(line);

  std::vector<double> lo = header.at("region").at("lower").get<std::vector<double>>();
  std::vector<double> hi = header.at("region").at("upper").get<std::vector<double>>();
  std::vector<int> counts = header.at("counts").get<std::vector<int>>();
  const Location lower{std::span<const double>(lo)};
  const Location upper{std::span<const double>(hi)};
  const Region region(lower, upper);
  const Grid grid(region, std::span<const int>(counts));
  const std::string unit_str = header.at("unit").get<std::string>();
  const Unit unit = unit_str == "db" ? Unit::kDb : Unit::kLinearWatts;

  Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
  Eigen::Index k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (k >= values.size()) throw std::runtime_error("gridmap: too many values");
      values(k++) = std::stod(cell);
    }
  }
  if (k != values.size()) throw std::runtime_error("gridmap: value count mismatch");
  return GridMap(grid, std::move(values), unit);
}

void save_gridmap(const GridMap& map, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_gridmap(map, os);
}

GridMap load_gridmap(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_gridmap(is);
}

namespace {

void check_comparable(const GridMap& a, const GridMap& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
  if (a.unit() != b.unit()) throw std::invalid_argument("unit mismatch: convert explicitly");
}

}  // namespace

double mse(const GridMap& a, const GridMap& b) {
  check_comparable(a, b);
  return (a.values() - b.values()).squaredNorm() / static_cast<double>(a.values().size());
}

double mae(const GridMap& a, const GridMap& b) {
  check_comparable(a, b);
  return (a.values() - b.values()).cwiseAbs().mean();
}

}  // namespace radiomap
