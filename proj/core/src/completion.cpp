#include "radiomap/completion.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <stdexcept>

namespace radiomap {

PartialGridObservation from_measurements(const Grid& grid, const MeasurementSet& data) {
  if (grid.dim() != 2) throw std::invalid_argument("from_measurements: completion needs a 2D grid");
  if (data.empty()) throw std::invalid_argument("from_measurements: empty measurement set");

  std::map<std::pair<int, int>, std::pair<double, int>> bins;
  for (const Measurement& m : data.measurements()) {
    const auto mi = grid.multi_index(nearest_grid_point(grid, m.location));
    auto& [sum, count] = bins[{mi[0], mi[1]}];
    sum += m.value;
    count += 1;
  }

  PartialGridObservation obs;
  obs.grid = grid;
  obs.unit = data.unit();
  obs.values.resize(static_cast<Eigen::Index>(bins.size()));
  Eigen::Index k = 0;
  for (const auto& [index, acc] : bins) {
    obs.observed.push_back(index);
    obs.values(k++) = acc.first / acc.second;
  }
  return obs;
}

Eigen::MatrixXd svt(const Eigen::MatrixXd& m, double tau) {
  if (tau < 0.0) throw std::invalid_argument("svt: tau must be nonnegative");
  if (tau == 0.0) return m;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::max(0.0, s(i) - tau);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

namespace {

double nuclear_norm(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

}  // namespace

double completion_objective(const PartialGridObservation& obs, double lambda,
                            const Eigen::MatrixXd& p) {
  double fit = 0.0;
  for (std::size_t k = 0; k < obs.observed.size(); ++k) {
    const auto& [i, j] = obs.observed[k];
    const double r = p(i, j) - obs.values(static_cast<Eigen::Index>(k));
    fit += r * r;
  }
  return 0.5 * fit + lambda * nuclear_norm(p);
}

CompletionResult complete(const PartialGridObservation& obs, double lambda, double tolerance,
                          int max_iterations) {
  if (lambda < 0.0) throw std::invalid_argument("complete: lambda must be nonnegative");
  if (obs.observed.empty()) throw std::invalid_argument("complete: no observed entries");

  const Eigen::Index rows = obs.grid.count(0);
  const Eigen::Index cols = obs.grid.count(1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(rows, cols);

  CompletionResult result;
  double prev = completion_objective(obs, lambda, p);
  result.objective_history.push_back(prev);
  int it = 0;
  for (; it < max_iterations; ++it) {
    // Gradient step on the masked data term (Lipschitz constant 1).
    Eigen::MatrixXd g = p;
    for (std::size_t k = 0; k < obs.observed.size(); ++k) {
      const auto& [i, j] = obs.observed[k];
      g(i, j) -= p(i, j) - obs.values(static_cast<Eigen::Index>(k));
    }
    p = svt(g, lambda);
    const double obj = completion_objective(obs, lambda, p);
    result.objective_history.push_back(obj);
    const double change = std::abs(prev - obj) / std::max(1.0, std::abs(prev));
    prev = obj;
    if (change <= tolerance) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.iterations = it;
  result.map = GridMap::from_matrix(obs.grid, p, obs.unit);
  return result;
}

}  // namespace radiomap
