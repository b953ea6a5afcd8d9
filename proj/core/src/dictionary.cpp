#include "radiomap/dictionary.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "radiomap/linalg.hpp"
#include "radiomap/random.hpp"

namespace radiomap {

SensorGraph SensorGraph::from_adjacency(Eigen::MatrixXd a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SensorGraph: adjacency must be square");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) throw std::invalid_argument("SensorGraph: diagonal must be zero");
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) != a(j, i)) throw std::invalid_argument("SensorGraph: adjacency must be symmetric");
      if (a(i, j) != 0.0 && a(i, j) != 1.0) {
        throw std::invalid_argument("SensorGraph: adjacency entries must be 0 or 1");
      }
    }
  }
  SensorGraph g;
  g.laplacian = Eigen::MatrixXd(a.rowwise().sum().asDiagonal()) - a;
  g.adjacency = std::move(a);
  return g;
}

SensorGraph SensorGraph::from_edges(int num_sensors, const std::vector<std::pair<int, int>>& edges) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_sensors, num_sensors);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= num_sensors || j >= num_sensors || i == j) {
      throw std::invalid_argument("SensorGraph: invalid edge");
    }
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return from_adjacency(std::move(a));
}

SensorGraph load_sensor_graph(const std::string& path, int num_sensors) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::vector<std::pair<int, int>> edges;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (std::getline(ss, a, ',') && std::getline(ss, b, ',')) {
      edges.emplace_back(std::stoi(a), std::stoi(b));
    }
  }
  return SensorGraph::from_edges(num_sensors, edges);
}

std::vector<Snapshot> load_snapshots(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::map<int, std::vector<std::pair<int, double>>> by_time;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("time", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    std::stringstream ss(line);
    std::string t, idx, val;
    if (std::getline(ss, t, ',') && std::getline(ss, idx, ',') && std::getline(ss, val, ',')) {
      by_time[std::stoi(t)].emplace_back(std::stoi(idx), std::stod(val));
    }
  }
  std::vector<Snapshot> snaps;
  for (auto& [t, entries] : by_time) {
    Snapshot s;
    s.time = t;
    s.observed_values.resize(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k) {
      s.observed_indices.push_back(entries[k].first);
      s.observed_values(static_cast<Eigen::Index>(k)) = entries[k].second;
    }
    snaps.push_back(std::move(s));
  }
  return snaps;
}

void save_snapshots(const std::vector<Snapshot>& snapshots, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "time,sensor_index,value\n";
  char buf[32];
  for (const Snapshot& s : snapshots) {
    for (std::size_t k = 0; k < s.observed_indices.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", s.observed_values(static_cast<Eigen::Index>(k)));
      os << s.time << ',' << s.observed_indices[k] << ',' << buf << "\n";
    }
  }
}

namespace {

Eigen::MatrixXd observed_rows(const Eigen::MatrixXd& d, const Snapshot& snapshot) {
  Eigen::MatrixXd b(static_cast<Eigen::Index>(snapshot.observed_indices.size()), d.cols());
  for (std::size_t k = 0; k < snapshot.observed_indices.size(); ++k) {
    b.row(static_cast<Eigen::Index>(k)) = d.row(snapshot.observed_indices[k]);
  }
  return b;
}

}  // namespace

double snapshot_objective(const Dictionary& dict, const Snapshot& snapshot,
                          const Eigen::VectorXd& code, double lambda_s, double lambda_l,
                          const Eigen::MatrixXd& laplacian) {
  const Eigen::MatrixXd b = observed_rows(dict.atoms, snapshot);
  const Eigen::VectorXd v = dict.atoms * code;
  double obj = 0.5 * (snapshot.observed_values - b * code).squaredNorm();
  obj += lambda_s * code.lpNorm<1>();
  obj += 0.5 * lambda_l * v.dot(laplacian * v);
  return obj;
}

SparseCodeResult sparse_code(const Dictionary& dict, const Snapshot& snapshot, double lambda_s,
                             double lambda_l, const Eigen::MatrixXd& laplacian,
                             const Eigen::VectorXd* warm_start, double tolerance,
                             int max_iterations) {
  if (lambda_s < 0.0 || lambda_l < 0.0) {
    throw std::invalid_argument("sparse_code: regularization weights must be nonnegative");
  }
  const Eigen::Index q = dict.num_atoms();
  const Eigen::MatrixXd b = observed_rows(dict.atoms, snapshot);
  const Eigen::MatrixXd g = lambda_l * dict.atoms.transpose() * laplacian * dict.atoms;
  const Eigen::MatrixXd hessian = b.transpose() * b + g;
  const double lipschitz = spectral_norm(hessian);
  const double step = lipschitz > 0.0 ? 1.0 / (1.01 * lipschitz) : 1.0;
  const double scale =
      b.rows() > 0 ? std::max(1.0, (b.transpose() * snapshot.observed_values).cwiseAbs().maxCoeff())
                   : 1.0;

  Eigen::VectorXd s = warm_start != nullptr ? *warm_start : Eigen::VectorXd::Zero(q);
  SparseCodeResult result;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd grad = hessian * s - (b.rows() > 0
                                                    ? (b.transpose() * snapshot.observed_values).eval()
                                                    : Eigen::VectorXd::Zero(q).eval());
    s = soft_threshold(s - step * grad, lambda_s * step);
    if (it % 5 == 0 || it == max_iterations - 1) {
      const Eigen::VectorXd g2 = hessian * s - (b.rows() > 0
                                                    ? (b.transpose() * snapshot.observed_values).eval()
                                                    : Eigen::VectorXd::Zero(q).eval());
      double r = 0.0;
      for (Eigen::Index i = 0; i < q; ++i) {
        const double v = s(i) != 0.0 ? std::abs(g2(i) + lambda_s * (s(i) > 0.0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(g2(i)) - lambda_s);
        r = std::max(r, v);
      }
      if (r <= tolerance * scale) {
        result.converged = true;
        ++it;
        break;
      }
    }
  }
  result.code = std::move(s);
  result.iterations = it;
  return result;
}

namespace {

/// Exact minimizer of 1/2 d^T H d - b^T d over the unit ball.
Eigen::VectorXd ball_constrained_minimizer(const Eigen::MatrixXd& h, const Eigen::VectorXd& b,
                                           const Eigen::VectorXd& fallback) {
  const double bnorm = b.norm();
  if (bnorm == 0.0 && h.cwiseAbs().maxCoeff() == 0.0) return fallback;  // unused atom
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd beta = eig.eigenvectors().transpose() * b;

  auto norm_at = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
      const double den = lam(i) + mu;
      s += (beta(i) * beta(i)) / (den * den);
    }
    return std::sqrt(s);
  };

  const double lam_min = lam.minCoeff();
  if (lam_min > 0.0 && norm_at(0.0) <= 1.0) {
    return eig.eigenvectors() * (beta.array() / lam.array()).matrix();
  }
  double lo = 1e-300, hi = bnorm;
  while (norm_at(hi) > 1.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm_at(mid) > 1.0 ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  return eig.eigenvectors() * (beta.array() / (lam.array() + mu)).matrix();
}

double total_objective(const Dictionary& dict, const std::vector<Snapshot>& snapshots,
                       const std::vector<Eigen::VectorXd>& codes, double lambda_s, double lambda_l,
                       const Eigen::MatrixXd& laplacian) {
  double total = 0.0;
  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    total += snapshot_objective(dict, snapshots[t], codes[t], lambda_s, lambda_l, laplacian);
  }
  return total;
}

}  // namespace

LearnResult learn_dictionary(const std::vector<Snapshot>& snapshots, int num_atoms, double lambda_s,
                             double lambda_l, const Eigen::MatrixXd& laplacian, std::uint64_t seed,
                             int max_sweeps, double tolerance) {
  if (snapshots.empty()) throw std::invalid_argument("learn_dictionary: need at least one snapshot");
  if (num_atoms < 1) throw std::invalid_argument("learn_dictionary: need at least one atom");
  const Eigen::Index n = laplacian.rows();
  for (const Snapshot& s : snapshots) {
    for (int idx : s.observed_indices) {
      if (idx < 0 || idx >= n) throw std::invalid_argument("learn_dictionary: sensor index out of range");
    }
  }

  LearnResult result;
  Rng rng = make_rng(seed);
  result.dictionary.atoms.resize(n, num_atoms);
  for (int q = 0; q < num_atoms; ++q) {
    Eigen::VectorXd col = normal_vector(rng, n);
    const double norm = col.norm();
    result.dictionary.atoms.col(q) = norm > 0.0 ? (col / norm).eval() : col;
  }
  result.codes.assign(snapshots.size(), Eigen::VectorXd::Zero(num_atoms));

  double prev = total_objective(result.dictionary, snapshots, result.codes, lambda_s, lambda_l,
                                laplacian);
  result.objective_history.push_back(prev);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    for (std::size_t t = 0; t < snapshots.size(); ++t) {
      result.codes[t] = sparse_code(result.dictionary, snapshots[t], lambda_s, lambda_l, laplacian,
                                    &result.codes[t])
                            .code;
    }

    // Column-wise dictionary update; each ball-constrained quadratic is
    // solved exactly, so the sweep cannot increase the objective.
    for (int q = 0; q < num_atoms; ++q) {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      for (std::size_t t = 0; t < snapshots.size(); ++t) {
        const double sq = result.codes[t](q);
        if (sq == 0.0) continue;
        const Eigen::VectorXd v_rest =
            result.dictionary.atoms * result.codes[t] - sq * result.dictionary.atoms.col(q);
        for (std::size_t k = 0; k < snapshots[t].observed_indices.size(); ++k) {
          const int row = snapshots[t].observed_indices[k];
          h(row, row) += sq * sq;
          b(row) += sq * (snapshots[t].observed_values(static_cast<Eigen::Index>(k)) - v_rest(row));
        }
        if (lambda_l > 0.0) {
          h += (lambda_l * sq * sq) * laplacian;
          b -= (lambda_l * sq) * (laplacian * v_rest);
        }
      }
      result.dictionary.atoms.col(q) =
          ball_constrained_minimizer(h, b, result.dictionary.atoms.col(q));
    }

    const double obj = total_objective(result.dictionary, snapshots, result.codes, lambda_s,
                                       lambda_l, laplacian);
    result.objective_history.push_back(obj);
    const double change = std::abs(prev - obj) / std::max(1.0, std::abs(prev));
    prev = obj;
    if (change <= tolerance) {
      result.converged = true;
      ++sweep;
      break;
    }
  }
  result.sweeps = sweep;
  return result;
}

Eigen::VectorXd reconstruct(const Dictionary& dict, const Snapshot& snapshot, double lambda_s,
                            double lambda_l, const Eigen::MatrixXd& laplacian) {
  const SparseCodeResult code = sparse_code(dict, snapshot, lambda_s, lambda_l, laplacian);
  return dict.atoms * code.code;
}

}  // namespace radiomap
